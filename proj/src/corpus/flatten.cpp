#include "forge/corpus/flatten.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include <fmt/format.h>

#include "forge/common/error.hpp"

namespace forge::corpus {

namespace {

struct Directive {
    std::size_t begin = 0;
    std::size_t end = 0;  // one past the closing brace
    std::string target;
};

bool in_comment(std::string_view text, std::size_t pos) {
    const auto line_start = text.rfind('\n', pos == 0 ? 0 : pos - 1);
    std::size_t i = line_start == std::string_view::npos ? 0 : line_start + 1;
    for (; i < pos; ++i) {
        if (text[i] == '\\') {
            ++i;
            continue;
        }
        if (text[i] == '%') return true;
    }
    return false;
}

// Next \input{..} or \include{..} at or after `from`, outside comments.
std::optional<Directive> next_directive(std::string_view text, std::size_t from) {
    for (auto pos = text.find('\\', from); pos != std::string_view::npos; pos = text.find('\\', pos + 1)) {
        std::size_t name_end = pos + 1;
        while (name_end < text.size() && std::isalpha(static_cast<unsigned char>(text[name_end]))) ++name_end;
        const auto name = text.substr(pos + 1, name_end - pos - 1);
        if (name != "input" && name != "include") {
            if (name.empty()) ++pos;  // skip escaped char such as "\\"
            continue;
        }
        std::size_t open = name_end;
        while (open < text.size() && (text[open] == ' ' || text[open] == '\t')) ++open;
        if (open >= text.size() || text[open] != '{') continue;
        const auto close = text.find('}', open);
        if (close == std::string_view::npos) continue;
        if (in_comment(text, pos)) continue;
        std::string target(text.substr(open + 1, close - open - 1));
        const auto a = target.find_first_not_of(" \t");
        const auto b = target.find_last_not_of(" \t");
        target = a == std::string::npos ? std::string{} : target.substr(a, b - a + 1);
        return Directive{pos, close + 1, std::move(target)};
    }
    return std::nullopt;
}

const std::string* resolve(const std::map<std::string, std::string>& files, std::string target, std::string& key) {
    while (target.rfind("./", 0) == 0) target.erase(0, 2);
    for (const auto& candidate : {target, target + ".tex"}) {
        if (auto it = files.find(candidate); it != files.end()) {
            key = it->first;
            return &it->second;
        }
    }
    return nullptr;
}

class Flattener {
public:
    Flattener(const std::map<std::string, std::string>& files, std::string_view main_text, const std::string& main_name)
        : files_(files), main_text_(main_text), main_name_(main_name) {}

    void expand(std::string_view text, std::vector<std::string>& stack, std::string& out) {
        const int depth = static_cast<int>(stack.size()) - 1;
        std::size_t cursor = 0;
        while (auto d = next_directive(text, cursor)) {
            out.append(text.substr(cursor, d->begin - cursor));
            cursor = d->end;
            std::string key;
            std::string_view content;
            if (const std::string* aux = resolve(files_, d->target, key)) {
                content = *aux;
            } else if (d->target == main_name_ || d->target + ".tex" == main_name_) {
                key = main_name_;
                content = main_text_;
            } else {
                out.append(text.substr(d->begin, d->end - d->begin));
                if (std::find(result.unresolved.begin(), result.unresolved.end(), d->target) == result.unresolved.end()) {
                    result.unresolved.push_back(d->target);
                }
                continue;
            }
            if (std::find(stack.begin(), stack.end(), key) != stack.end()) {
                auto path = stack;
                path.push_back(key);
                throw CycleError(std::move(path));
            }
            if (depth + 1 > kMaxIncludeDepth) {
                throw DepthError(fmt::format("inclusion depth exceeds {} at {}", kMaxIncludeDepth, key));
            }
            result.included.push_back(key);
            stack.push_back(key);
            expand(content, stack, out);
            stack.pop_back();
        }
        out.append(text.substr(cursor));
    }

    FlattenResult result;

private:
    const std::map<std::string, std::string>& files_;
    std::string_view main_text_;
    const std::string& main_name_;
};

}  // namespace

FlattenResult flatten_latex(std::string_view main_file,
                            const std::map<std::string, std::string>& auxiliary_files,
                            const std::string& main_name) {
    if (main_file.find("\\begin{document}") == std::string_view::npos) {
        throw ContractError(fmt::format("{} has no \\begin{{document}}", main_name));
    }
    Flattener f(auxiliary_files, main_file, main_name);
    std::vector<std::string> stack{main_name};
    f.result.latex.reserve(main_file.size());
    f.expand(main_file, stack, f.result.latex);
    return std::move(f.result);
}

}  // namespace forge::corpus
