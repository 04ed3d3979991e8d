#include "forge/corpus/compile.hpp"

#include <cstdlib>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/common/hash.hpp"
#include "forge/common/subprocess.hpp"

namespace forge::corpus {

namespace {

bool needs_rerun(std::string_view log) {
    return log.find("Rerun to get") != std::string_view::npos ||
           log.find("There were undefined references") != std::string_view::npos ||
           log.find("Label(s) may have changed") != std::string_view::npos;
}

bool looks_like_pdf(const fs::path& p) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec) || fs::file_size(p, ec) < 8) return false;
    const auto head = read_file(p).substr(0, 1024);
    return head.find("%PDF-") != std::string::npos;
}

nlohmann::json result_to_json(const CompilationResult& r) {
    return {{"status", r.ok() ? "success" : "failure"},
            {"log_excerpt", r.log_excerpt},
            {"timed_out", r.timed_out},
            {"passes", r.passes}};
}

std::string read_log(const fs::path& workdir) {
    for (const auto* name : {"main.log", "engine.out"}) {
        const auto p = workdir / name;
        if (fs::exists(p)) {
            auto text = read_file(p);
            if (!text.empty()) return text;
        }
    }
    return {};
}

}  // namespace

CompileOptions CompileOptions::with_env_overrides() const {
    CompileOptions out = *this;
    if (const char* e = std::getenv("FORGE_LATEX_ENGINE"); e && *e) out.engine = e;
    if (const char* t = std::getenv("FORGE_LATEX_TIMEOUT"); t && *t) {
        try {
            out.timeout = std::chrono::seconds(std::stol(t));
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("FORGE_LATEX_TIMEOUT is not an integer: {}", t));
        }
    }
    return out;
}

std::string last_lines(std::string_view text, std::size_t n) {
    if (n == 0 || text.empty()) return {};
    std::size_t end = text.size();
    while (end > 0 && text[end - 1] == '\n') --end;
    std::size_t pos = end;
    std::size_t count = 0;
    while (pos > 0) {
        if (text[pos - 1] == '\n' && ++count == n) break;
        --pos;
    }
    return std::string(text.substr(pos, end - pos));
}

CompilationResult compile_pdf(std::string_view latex,
                              const fs::path& workdir,
                              const CompileOptions& options,
                              const std::string& paper_id) {
    const auto engine = find_executable(options.engine);
    if (!engine) throw EnvironmentError(fmt::format("LaTeX engine '{}' not found on PATH", options.engine));

    const std::string key = sha256_hex(fmt::format("{}\n{}", options.engine, latex));
    fs::path cache_entry;
    if (options.cache_dir) {
        cache_entry = *options.cache_dir / key;
        const auto meta_path = cache_entry / "result.json";
        if (fs::exists(meta_path)) {
            try {
                const auto meta = nlohmann::json::parse(read_file(meta_path));
                CompilationResult r;
                r.paper_id = paper_id;
                r.status = meta.at("status") == "success" ? CompileStatus::success : CompileStatus::failure;
                r.log_excerpt = meta.value("log_excerpt", "");
                r.timed_out = meta.value("timed_out", false);
                r.passes = meta.value("passes", 0);
                r.cache_hit = true;
                const auto cached_pdf = cache_entry / "out.pdf";
                if (!r.ok() || looks_like_pdf(cached_pdf)) {
                    if (r.ok()) {
                        fs::create_directories(workdir);
                        const auto pdf = workdir / "main.pdf";
                        fs::copy_file(cached_pdf, pdf, fs::copy_options::overwrite_existing);
                        r.pdf_path = pdf;
                    }
                    spdlog::debug("compile cache hit {} ({})", key.substr(0, 12), paper_id);
                    return r;
                }
            } catch (const std::exception& e) {
                spdlog::warn("ignoring unreadable compile cache entry {}: {}", meta_path.string(), e.what());
            }
        }
    }

    fs::create_directories(workdir);
    write_file_atomic(workdir / "main.tex", latex);
    const auto pdf = workdir / "main.pdf";
    std::error_code ec;
    fs::remove(pdf, ec);

    CompilationResult r;
    r.paper_id = paper_id;
    const std::vector<std::string> argv{engine->string(), "-interaction=nonstopmode", "-halt-on-error",
                                        "-file-line-error", "main.tex"};
    const auto timeout = std::chrono::duration_cast<std::chrono::milliseconds>(options.timeout);
    ProcessResult proc;
    for (int pass = 1; pass <= std::max(1, options.max_passes); ++pass) {
        proc = run_process(argv, workdir, workdir / "engine.out", timeout);
        r.passes = pass;
        if (proc.timed_out || proc.exit_code != 0) break;
        if (!needs_rerun(read_log(workdir))) break;
    }

    if (proc.timed_out) {
        r.timed_out = true;
        r.log_excerpt = fmt::format("{}\n[timeout after {} s]", last_lines(read_log(workdir), kLogExcerptLines - 1),
                                    options.timeout.count());
    } else if (proc.exit_code == 0 && looks_like_pdf(pdf)) {
        r.status = CompileStatus::success;
        r.pdf_path = pdf;
    } else {
        r.log_excerpt = last_lines(read_log(workdir), kLogExcerptLines);
        if (r.log_excerpt.empty()) r.log_excerpt = fmt::format("engine exited with status {}", proc.exit_code);
    }

    // Timeouts are not cached: they may depend on machine load.
    if (options.cache_dir && !r.timed_out) {
        fs::create_directories(cache_entry);
        if (r.ok()) write_file_atomic(cache_entry / "out.pdf", read_file(pdf));
        write_file_atomic(cache_entry / "result.json", result_to_json(r).dump(2));
    }
    return r;
}

}  // namespace forge::corpus
