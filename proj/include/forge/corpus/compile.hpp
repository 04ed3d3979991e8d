#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace forge::corpus {

enum class CompileStatus { success, failure };

struct CompilationResult {
    std::string paper_id;
    CompileStatus status = CompileStatus::failure;
    std::optional<std::filesystem::path> pdf_path;  // present iff success
    std::string log_excerpt;                        // last 50 log lines on failure
    bool timed_out = false;
    bool cache_hit = false;
    int passes = 0;

    bool ok() const noexcept { return status == CompileStatus::success; }
};

struct CompileOptions {
    std::string engine = "pdflatex";
    std::chrono::seconds timeout{120};
    int max_passes = 2;
    // Content-hash cache of successful and failed results; disabled if unset.
    std::optional<std::filesystem::path> cache_dir;

    // Applies FORGE_LATEX_ENGINE and FORGE_LATEX_TIMEOUT (seconds).
    CompileOptions with_env_overrides() const;
};

inline constexpr std::size_t kLogExcerptLines = 50;

// Writes `latex` to <workdir>/main.tex and runs the engine (nonstop mode) up
// to max_passes times; a second pass runs only when the log asks for a rerun
// or reports undefined references. Success iff the final pass exits 0 and
// produced a PDF. Missing bibliographies are not failures on their own.
// Throws EnvironmentError when the engine cannot be found.
CompilationResult compile_pdf(std::string_view latex,
                              const std::filesystem::path& workdir,
                              const CompileOptions& options = {},
                              const std::string& paper_id = {});

std::string last_lines(std::string_view text, std::size_t n);

}  // namespace forge::corpus
