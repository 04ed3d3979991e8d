#include "forge/corpus/pdf_text.hpp"

#include <cctype>
#include <cstring>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <zlib.h>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"

namespace forge::corpus {

namespace {

struct Object;
using Array = std::vector<Object>;
using Dict = std::vector<std::pair<std::string, Object>>;

struct Name {
    std::string value;
};
struct Ref {
    int num = 0;
    int gen = 0;
};
struct Keyword {
    std::string value;
};
struct Stream;

struct Object {
    std::variant<std::monostate, bool, double, std::string, Name, Ref, Keyword, Array, Dict, std::shared_ptr<Stream>> v;

    bool is_null() const { return std::holds_alternative<std::monostate>(v); }
    const Dict* dict() const;
    const Array* array() const { return std::get_if<Array>(&v); }
    const Name* name() const { return std::get_if<Name>(&v); }
    const Ref* ref() const { return std::get_if<Ref>(&v); }
    const double* number() const { return std::get_if<double>(&v); }
    const std::string* string() const { return std::get_if<std::string>(&v); }
    const Keyword* keyword() const { return std::get_if<Keyword>(&v); }
    const Stream* stream() const;
};

struct Stream {
    Dict dict;
    std::string raw;
};

const Dict* Object::dict() const {
    if (auto d = std::get_if<Dict>(&v)) return d;
    if (auto s = std::get_if<std::shared_ptr<Stream>>(&v)) return &(*s)->dict;
    return nullptr;
}

const Stream* Object::stream() const {
    if (auto s = std::get_if<std::shared_ptr<Stream>>(&v)) return s->get();
    return nullptr;
}

const Object* lookup(const Dict& d, std::string_view key) {
    for (const auto& [k, v] : d)
        if (k == key) return &v;
    return nullptr;
}

bool is_ws(char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0'; }
bool is_delim(char c) {
    return c == '(' || c == ')' || c == '<' || c == '>' || c == '[' || c == ']' || c == '{' || c == '}' || c == '/' || c == '%';
}

class Lexer {
public:
    explicit Lexer(std::string_view data, std::size_t pos = 0) : d_(data), p_(pos) {}

    std::size_t pos() const { return p_; }
    void seek(std::size_t p) { p_ = p; }
    bool eof() {
        skip_ws();
        return p_ >= d_.size();
    }

    void skip_ws() {
        while (p_ < d_.size()) {
            if (is_ws(d_[p_])) {
                ++p_;
            } else if (d_[p_] == '%') {
                while (p_ < d_.size() && d_[p_] != '\n' && d_[p_] != '\r') ++p_;
            } else {
                break;
            }
        }
    }

    // Parses one object; "n g R" references are folded. A keyword that is
    // not a value (operators, obj, endobj, stream, ...) comes back as Keyword.
    Object parse() {
        skip_ws();
        if (p_ >= d_.size()) throw ExtractionError("unexpected end of PDF data");
        const char c = d_[p_];
        if (c == '/') return Object{Name{parse_name()}};
        if (c == '(') return Object{parse_literal()};
        if (c == '<') {
            if (p_ + 1 < d_.size() && d_[p_ + 1] == '<') return parse_dict_or_stream();
            return Object{parse_hex()};
        }
        if (c == '[') {
            ++p_;
            Array a;
            for (;;) {
                skip_ws();
                if (p_ >= d_.size()) throw ExtractionError("unterminated array");
                if (d_[p_] == ']') {
                    ++p_;
                    break;
                }
                a.push_back(parse());
            }
            return Object{std::move(a)};
        }
        if (c == ']' || c == '>' || c == ')' || c == '{' || c == '}') {
            ++p_;
            return Object{Keyword{std::string(1, c)}};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') return parse_number_or_ref();
        const auto start = p_;
        while (p_ < d_.size() && !is_ws(d_[p_]) && !is_delim(d_[p_])) ++p_;
        if (p_ == start) {
            ++p_;
            return Object{Keyword{std::string(1, c)}};
        }
        std::string word(d_.substr(start, p_ - start));
        if (word == "true") return Object{true};
        if (word == "false") return Object{false};
        if (word == "null") return Object{};
        return Object{Keyword{std::move(word)}};
    }

private:
    std::optional<double> try_number() {
        const auto start = p_;
        std::size_t q = p_;
        if (q < d_.size() && (d_[q] == '-' || d_[q] == '+')) ++q;
        bool digits = false;
        while (q < d_.size() && (std::isdigit(static_cast<unsigned char>(d_[q])) || d_[q] == '.')) {
            digits = digits || d_[q] != '.';
            ++q;
        }
        if (!digits) return std::nullopt;
        p_ = q;
        std::string s(d_.substr(start, q - start));
        try {
            return std::stod(s);
        } catch (const std::exception&) {
            return 0.0;
        }
    }

    static bool is_int_token(std::string_view s) {
        if (s.empty()) return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    }

    std::string_view peek_token(std::size_t& q) const {
        while (q < d_.size() && is_ws(d_[q])) ++q;
        const auto s = q;
        while (q < d_.size() && !is_ws(d_[q]) && !is_delim(d_[q])) ++q;
        return d_.substr(s, q - s);
    }

    Object parse_number_or_ref() {
        const auto start = p_;
        auto n = try_number();
        if (!n) {
            ++p_;
            return Object{Keyword{std::string(d_.substr(start, 1))}};
        }
        const auto tok = d_.substr(start, p_ - start);
        if (is_int_token(tok)) {
            std::size_t q = p_;
            const auto gen = peek_token(q);
            if (is_int_token(gen)) {
                const auto r = peek_token(q);
                if (r == "R") {
                    p_ = q;
                    return Object{Ref{static_cast<int>(*n), std::stoi(std::string(gen))}};
                }
            }
        }
        return Object{*n};
    }

    std::string parse_name() {
        ++p_;
        std::string out;
        while (p_ < d_.size() && !is_ws(d_[p_]) && !is_delim(d_[p_])) {
            if (d_[p_] == '#' && p_ + 2 < d_.size() && std::isxdigit(static_cast<unsigned char>(d_[p_ + 1])) &&
                std::isxdigit(static_cast<unsigned char>(d_[p_ + 2]))) {
                out.push_back(static_cast<char>(std::stoi(std::string(d_.substr(p_ + 1, 2)), nullptr, 16)));
                p_ += 3;
            } else {
                out.push_back(d_[p_++]);
            }
        }
        return out;
    }

    std::string parse_literal() {
        ++p_;
        std::string out;
        int depth = 1;
        while (p_ < d_.size()) {
            char c = d_[p_++];
            if (c == '\\') {
                if (p_ >= d_.size()) break;
                char e = d_[p_++];
                switch (e) {
                    case 'n': out.push_back('\n'); break;
                    case 'r': out.push_back('\r'); break;
                    case 't': out.push_back('\t'); break;
                    case 'b': out.push_back('\b'); break;
                    case 'f': out.push_back('\f'); break;
                    case '\r':
                        if (p_ < d_.size() && d_[p_] == '\n') ++p_;
                        break;
                    case '\n': break;
                    default:
                        if (e >= '0' && e <= '7') {
                            int v = e - '0';
                            for (int k = 0; k < 2 && p_ < d_.size() && d_[p_] >= '0' && d_[p_] <= '7'; ++k) v = v * 8 + (d_[p_++] - '0');
                            out.push_back(static_cast<char>(v & 0xFF));
                        } else {
                            out.push_back(e);
                        }
                }
                continue;
            }
            if (c == '(') ++depth;
            if (c == ')' && --depth == 0) return out;
            out.push_back(c);
        }
        throw ExtractionError("unterminated string literal");
    }

    std::string parse_hex() {
        ++p_;
        std::string digits;
        while (p_ < d_.size() && d_[p_] != '>') {
            if (std::isxdigit(static_cast<unsigned char>(d_[p_]))) digits.push_back(d_[p_]);
            ++p_;
        }
        if (p_ >= d_.size()) throw ExtractionError("unterminated hex string");
        ++p_;
        if (digits.size() % 2) digits.push_back('0');
        std::string out;
        for (std::size_t i = 0; i < digits.size(); i += 2) out.push_back(static_cast<char>(std::stoi(digits.substr(i, 2), nullptr, 16)));
        return out;
    }

    Object parse_dict_or_stream() {
        p_ += 2;
        Dict d;
        for (;;) {
            skip_ws();
            if (p_ + 1 < d_.size() && d_[p_] == '>' && d_[p_ + 1] == '>') {
                p_ += 2;
                break;
            }
            if (p_ >= d_.size()) throw ExtractionError("unterminated dictionary");
            Object key = parse();
            const Name* k = key.name();
            if (!k) continue;  // tolerate junk
            d.emplace_back(k->value, parse());
        }
        // stream?
        std::size_t q = p_;
        while (q < d_.size() && is_ws(d_[q])) ++q;
        if (d_.substr(q, 6) != "stream") return Object{std::move(d)};
        q += 6;
        if (q < d_.size() && d_[q] == '\r') ++q;
        if (q < d_.size() && d_[q] == '\n') ++q;
        std::size_t len = std::string::npos;
        if (auto l = lookup(d, "Length"); l && l->number()) len = static_cast<std::size_t>(*l->number());
        std::size_t end;
        if (len != std::string::npos && q + len <= d_.size() &&
            d_.substr(q + len, 32).find("endstream") != std::string_view::npos) {
            end = q + len;
        } else {
            end = d_.find("endstream", q);
            if (end == std::string_view::npos) throw ExtractionError("stream without endstream");
            std::size_t e = end;
            if (e > q && d_[e - 1] == '\n') --e;
            if (e > q && d_[e - 1] == '\r') --e;
            end = e;
        }
        auto s = std::make_shared<Stream>();
        s->dict = std::move(d);
        s->raw.assign(d_.substr(q, end - q));
        p_ = d_.find("endstream", end) + 9;
        return Object{std::move(s)};
    }

    std::string_view d_;
    std::size_t p_;
};

std::string inflate(std::string_view in) {
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw ExtractionError("zlib init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    std::string out;
    char buf[16384];
    int rc;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof buf;
        rc = ::inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END && rc != Z_BUF_ERROR) {
            inflateEnd(&zs);
            throw ExtractionError("corrupt Flate stream");
        }
        out.append(buf, sizeof buf - zs.avail_out);
        if (rc == Z_BUF_ERROR && zs.avail_in == 0) break;  // truncated but usable
    } while (rc != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

class Document {
public:
    explicit Document(std::string_view data) : data_(data) {
        if (data.substr(0, 1024).find("%PDF-") == std::string_view::npos) throw ExtractionError("missing %PDF header");
        scan();
        load_object_streams();
    }

    const Object& resolve(const Object& o, int hops = 0) const {
        static const Object null_object;
        if (const Ref* r = o.ref()) {
            if (hops > 32) return null_object;
            auto it = objects_.find(r->num);
            if (it == objects_.end()) return null_object;
            return resolve(it->second, hops + 1);
        }
        return o;
    }

    const Object* get(const Dict& d, std::string_view key) const {
        const Object* o = lookup(d, key);
        return o ? &resolve(*o) : nullptr;
    }

    std::string decode(const Stream& s) const {
        std::vector<std::string> filters;
        if (const Object* f = get(s.dict, "Filter")) {
            if (const Name* n = f->name()) filters.push_back(n->value);
            if (const Array* a = f->array())
                for (const auto& x : *a)
                    if (const Name* n = resolve(x).name()) filters.push_back(n->value);
        }
        std::string data = s.raw;
        for (const auto& f : filters) {
            if (f == "FlateDecode" || f == "Fl") {
                data = inflate(data);
            } else {
                throw ExtractionError(fmt::format("unsupported stream filter {}", f));
            }
        }
        return data;
    }

    std::vector<const Dict*> pages() const {
        const Dict* catalog = find_catalog();
        if (!catalog) throw ExtractionError("no document catalog");
        const Object* root = get(*catalog, "Pages");
        if (!root || !root->dict()) throw ExtractionError("catalog has no page tree");
        std::vector<const Dict*> out;
        std::unordered_set<const Dict*> seen;
        walk(*root->dict(), out, seen, 0);
        return out;
    }

private:
    void scan() {
        Lexer lx(data_);
        std::vector<Object> window;
        while (!lx.eof()) {
            const auto before = lx.pos();
            Object o;
            try {
                o = lx.parse();
            } catch (const ExtractionError&) {
                lx.seek(before + 1);
                window.clear();
                continue;
            }
            if (const Keyword* k = o.keyword()) {
                if (k->value == "obj" && window.size() >= 2 && window[window.size() - 2].number() && window.back().number()) {
                    const int num = static_cast<int>(*window[window.size() - 2].number());
                    window.clear();
                    const auto body_start = lx.pos();
                    try {
                        Object body = lx.parse();
                        objects_[num] = std::move(body);
                    } catch (const ExtractionError&) {
                        lx.seek(body_start + 1);
                    }
                    continue;
                }
                if (k->value == "trailer") {
                    window.clear();
                    try {
                        Object t = lx.parse();
                        if (t.dict()) trailers_.push_back(std::move(t));
                    } catch (const ExtractionError&) {
                    }
                    continue;
                }
                window.clear();
                continue;
            }
            window.push_back(std::move(o));
            if (window.size() > 2) window.erase(window.begin());
        }
    }

    void load_object_streams() {
        std::vector<std::pair<int, const Stream*>> streams;
        for (const auto& [num, obj] : objects_) {
            const Stream* s = obj.stream();
            if (!s) continue;
            const Object* type = lookup(s->dict, "Type");
            if (type && type->name() && type->name()->value == "ObjStm") streams.emplace_back(num, s);
        }
        std::map<int, Object> found;
        for (const auto& [num, s] : streams) {
            std::string body;
            try {
                body = decode(*s);
            } catch (const ExtractionError&) {
                continue;
            }
            const Object* n_obj = get(s->dict, "N");
            const Object* first_obj = get(s->dict, "First");
            if (!n_obj || !first_obj || !n_obj->number() || !first_obj->number()) continue;
            const int n = static_cast<int>(*n_obj->number());
            const auto first = static_cast<std::size_t>(*first_obj->number());
            Lexer header(body);
            std::vector<std::pair<int, std::size_t>> entries;
            for (int i = 0; i < n; ++i) {
                Object a = header.parse(), b = header.parse();
                if (!a.number() || !b.number()) break;
                entries.emplace_back(static_cast<int>(*a.number()), static_cast<std::size_t>(*b.number()));
            }
            for (const auto& [obj_num, off] : entries) {
                if (first + off >= body.size()) continue;
                try {
                    Lexer lx(body, first + off);
                    found[obj_num] = lx.parse();
                } catch (const ExtractionError&) {
                }
            }
            // `body` dies here; objects parsed from it own their data.
        }
        for (auto& [num, o] : found) objects_.try_emplace(num, std::move(o));
    }

    const Dict* find_catalog() const {
        auto from = [&](const Dict& d) -> const Dict* {
            const Object* root = get(d, "Root");
            return root ? root->dict() : nullptr;
        };
        for (auto it = trailers_.rbegin(); it != trailers_.rend(); ++it)
            if (auto c = from(*it->dict())) return c;
        for (const auto& [num, obj] : objects_) {
            const Dict* d = obj.dict();
            if (!d) continue;
            const Object* type = lookup(*d, "Type");
            if (!type || !type->name()) continue;
            if (type->name()->value == "XRef")
                if (auto c = from(*d)) return c;
        }
        for (const auto& [num, obj] : objects_) {
            const Dict* d = obj.dict();
            if (!d) continue;
            const Object* type = lookup(*d, "Type");
            if (type && type->name() && type->name()->value == "Catalog") return d;
        }
        return nullptr;
    }

    void walk(const Dict& node, std::vector<const Dict*>& out, std::unordered_set<const Dict*>& seen, int depth) const {
        if (depth > 64 || !seen.insert(&node).second) return;
        const Object* kids = get(node, "Kids");
        if (kids && kids->array()) {
            for (const auto& k : *kids->array())
                if (const Dict* d = resolve(k).dict()) walk(*d, out, seen, depth + 1);
            return;
        }
        out.push_back(&node);
    }

    std::string_view data_;
    std::map<int, Object> objects_;
    std::vector<Object> trailers_;
};

void append_glyphs(std::string& out, std::string_view bytes) {
    for (unsigned char c : bytes) {
        switch (c) {
            case 0x0B: out += "ff"; break;
            case 0x0C: out += "fi"; break;
            case 0x0D: out += "fl"; break;
            case 0x0E: out += "ffi"; break;
            case 0x0F: out += "ffl"; break;
            case '\t': case '\n': out.push_back(' '); break;
            default:
                if (c < 0x20) break;
                if (c < 0x80) {
                    out.push_back(static_cast<char>(c));
                } else {
                    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
                    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
                }
        }
    }
}

// Kerning offsets below this (thousandths of an em) are word gaps.
constexpr double kWordGap = -200.0;

void interpret(std::string_view content, std::string& out) {
    Lexer lx(content);
    std::vector<Object> operands;
    bool have_y = false;
    double line_y = 0.0;
    while (!lx.eof()) {
        Object o;
        try {
            o = lx.parse();
        } catch (const ExtractionError&) {
            break;
        }
        const Keyword* k = o.keyword();
        if (!k) {
            operands.push_back(std::move(o));
            continue;
        }
        const std::string& op = k->value;
        auto num = [&](std::size_t from_end) -> double {
            if (operands.size() < from_end) return 0.0;
            const double* d = operands[operands.size() - from_end].number();
            return d ? *d : 0.0;
        };
        if (op == "BI") {
            // inline image: skip to EI
            auto rest = content.substr(lx.pos());
            auto ei = rest.find("EI");
            lx.seek(ei == std::string_view::npos ? content.size() : lx.pos() + ei + 2);
        } else if (op == "BT") {
            have_y = false;
        } else if (op == "ET") {
            out.push_back(' ');
        } else if (op == "Td" || op == "TD") {
            out.push_back(num(1) != 0.0 ? '\n' : ' ');
        } else if (op == "Tm") {
            const double y = num(1);
            out.push_back(have_y && line_y != y ? '\n' : ' ');
            have_y = true;
            line_y = y;
        } else if (op == "T*") {
            out.push_back('\n');
        } else if (op == "Tj") {
            if (!operands.empty())
                if (auto s = operands.back().string()) append_glyphs(out, *s);
        } else if (op == "'" || op == "\"") {
            out.push_back('\n');
            if (!operands.empty())
                if (auto s = operands.back().string()) append_glyphs(out, *s);
        } else if (op == "TJ") {
            if (!operands.empty())
                if (const Array* a = operands.back().array())
                    for (const auto& item : *a) {
                        if (auto s = item.string()) append_glyphs(out, *s);
                        else if (auto d = item.number(); d && *d < kWordGap) out.push_back(' ');
                    }
        }
        operands.clear();
    }
}

std::string tidy(const std::string& raw) {
    // Rejoin "identifi-\ncation": letter, hyphen, line break, lowercase letter.
    std::string joined;
    joined.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '-' && i > 0 && std::isalpha(static_cast<unsigned char>(raw[i - 1]))) {
            std::size_t j = i + 1;
            bool newline = false;
            for (; j < raw.size() && is_ws(raw[j]); ++j) {
                if (raw[j] == '\n' || raw[j] == '\r') newline = true;
            }
            if (newline && j < raw.size() && std::islower(static_cast<unsigned char>(raw[j]))) {
                i = j - 1;
                continue;
            }
        }
        joined.push_back(raw[i]);
    }
    std::string out;
    out.reserve(joined.size());
    for (char c : joined) {
        if (is_ws(c)) {
            if (!out.empty() && out.back() != ' ') out.push_back(' ');
        } else {
            out.push_back(c);
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

}  // namespace

std::string extract_pdf_text_from_bytes(std::string_view bytes) {
    Document doc(bytes);
    std::string raw;
    for (const Dict* page : doc.pages()) {
        const Object* contents = doc.get(*page, "Contents");
        if (!contents) continue;
        std::vector<const Stream*> streams;
        if (const Stream* s = contents->stream()) streams.push_back(s);
        if (const Array* a = contents->array())
            for (const auto& item : *a)
                if (const Stream* s = doc.resolve(item).stream()) streams.push_back(s);
        // Content may be split mid-token across streams; interpret the concatenation.
        std::string content;
        for (const Stream* s : streams) {
            content += doc.decode(*s);
            content.push_back('\n');
        }
        interpret(content, raw);
        raw.push_back('\n');
    }
    return tidy(raw);
}

std::string extract_pdf_text(const std::filesystem::path& pdf_path) {
    std::string bytes;
    try {
        bytes = read_file(pdf_path);
    } catch (const std::exception& e) {
        throw ExtractionError(fmt::format("cannot read {}: {}", pdf_path.string(), e.what()));
    }
    return extract_pdf_text_from_bytes(bytes);
}

}  // namespace forge::corpus
