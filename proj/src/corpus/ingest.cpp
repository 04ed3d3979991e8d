#include "forge/corpus/ingest.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/common/time.hpp"
#include "forge/corpus/flatten.hpp"

namespace forge::corpus {

PaperSource ingest_project(const fs::path& project_dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(project_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".tex") continue;
        files[fs::relative(entry.path(), project_dir).generic_string()] = read_file(entry.path());
    }
    std::string main_name;
    if (files.count("main.tex")) {
        main_name = "main.tex";
    } else {
        for (const auto& [name, text] : files) {
            if (text.find("\\begin{document}") == std::string::npos) continue;
            if (!main_name.empty()) throw ContractError(project_dir.string() + ": more than one candidate main file");
            main_name = name;
        }
    }
    if (main_name.empty()) throw ContractError(project_dir.string() + ": no main .tex file");

    const std::string main_text = files.at(main_name);
    files.erase(main_name);
    auto flat = flatten_latex(main_text, files, main_name);

    PaperSource paper;
    paper.paper_id = project_dir.filename().string();
    paper.latex = std::move(flat.latex);
    paper.title = extract_title(paper.latex);
    if (const auto meta = project_dir / "meta.json"; fs::exists(meta)) {
        const auto j = nlohmann::json::parse(read_file(meta));
        paper.title = j.value("title", paper.title);
        paper.arxiv_id = j.value("arxiv_id", "");
    }
    paper.fetched_at = utc_timestamp();
    validate_paper(paper);
    return paper;
}

IngestResult ingest_projects(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    std::vector<fs::path> projects;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory()) projects.push_back(entry.path());
    std::sort(projects.begin(), projects.end());

    IngestResult out;
    for (const auto& p : projects) {
        try {
            out.papers.push_back(ingest_project(p));
        } catch (const std::exception& e) {
            out.failures.push_back({p.filename().string(), e.what()});
        }
    }
    return out;
}

}  // namespace forge::corpus
