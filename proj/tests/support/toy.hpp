#pragma once

// Shared setup for tests that run the pipeline on the two-paper toy corpus.
// Needs FORGE_FIXTURES and FORGE_FAKE_ENGINE from the test target.

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

#include "forge/common/fs.hpp"
#include "forge/corpus/compile.hpp"
#include "forge/corpus/ingest.hpp"
#include "forge/llm/gateway.hpp"
#include "forge/llm/mock.hpp"
#include "forge/pipeline/store.hpp"

namespace forge::testsupport {

inline std::filesystem::path toy_dir() { return std::filesystem::path(FORGE_FIXTURES) / "toy"; }

inline std::vector<corpus::PaperSource> toy_papers() {
    return corpus::ingest_projects(toy_dir() / "papers").papers;
}

inline void seed_toy_corpus(const std::filesystem::path& data_root) {
    const pipeline::RecordStore store(data_root);
    for (const auto& p : toy_papers()) store.save_paper(p);
}

inline llm::GatewayOptions quiet_gateway_options() {
    llm::GatewayOptions o;
    o.sleep = [](std::chrono::milliseconds) {};
    return o;
}

inline std::unique_ptr<llm::Gateway> mock_gateway(nlohmann::json script,
                                                  std::shared_ptr<llm::AuditLog> audit = std::make_shared<llm::AuditLog>()) {
    auto g = std::make_unique<llm::Gateway>(quiet_gateway_options(), std::move(audit));
    g->register_provider("mock", std::make_shared<llm::MockProvider>(std::move(script)));
    return g;
}

inline std::unique_ptr<llm::Gateway> toy_gateway() {
    return mock_gateway(nlohmann::json::parse(read_file(toy_dir() / "mock_script.json")));
}

inline corpus::CompileOptions fake_compile() {
    corpus::CompileOptions o;
    o.engine = FORGE_FAKE_ENGINE;
    o.timeout = std::chrono::seconds(20);
    return o;
}

}  // namespace forge::testsupport
