#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "forge/corpus/paper.hpp"

namespace forge::corpus {

struct IngestFailure {
    std::string path;
    std::string message;
};

struct IngestResult {
    std::vector<PaperSource> papers;  // sorted by paper_id
    std::vector<IngestFailure> failures;
};

// Each subdirectory of `dir` is one LaTeX project named by its paper id.
// The main file is main.tex, else the only .tex file with
// \begin{document}. Optional meta.json supplies title and arxiv_id.
// Projects that cannot be read or flattened are reported, not thrown.
IngestResult ingest_projects(const std::filesystem::path& dir);

PaperSource ingest_project(const std::filesystem::path& project_dir);

}  // namespace forge::corpus
