#include <chrono>
#include <random>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "forge/common/error.hpp"
#include "forge/common/fs.hpp"
#include "forge/common/hash.hpp"
#include "forge/llm/embedded.hpp"
#include "forge/llm/gateway.hpp"
#include "forge/llm/http_provider.hpp"
#include "forge/llm/mock.hpp"
#include "forge/llm/parsers.hpp"
#include "forge/llm/prompts.hpp"

using namespace forge;
using namespace forge::llm;
using json = nlohmann::json;

// ---- prompts ---------------------------------------------------------------

TEST(Prompts, ChecksumsArePinned) {
    const std::map<std::string, std::string> pinned{
        {"claim_extraction.txt", "47b11305746218b288a11b23a6ed1a10f305730a52cb8bb72ee0e9f8bd64154d"},
        {"error_generation.txt", "adc819acee5f6561c68618c831259f40a20c69a11eca7827f733d2677e3b1822"},
        {"invalid_filter.txt", "ee927799b7c61b1c6d30b0e8b554a5e5f7eccbab1694add688a6fb8a26c3a7a4"},
        {"easy_filter.txt", "0d6f7cdfca86af189fb3bd95cf7fafd02cf4b8b088e30c42c8142d3f6bd5e7ed"},
        {"localization.txt", "a23558738b5c7aeb99f599e75f30fce81c2b5e380df6effd341a6a10f150f774"},
        {"internal_identification.txt", "d958d3ac78e0812a791da76946995d5a01ec61a653a103164f03339f90991c67"},
        {"identification.txt", "1206027c3a22ffdfd2b571a74adb22bc81e479766139b20eac1d7f02f04879e8"},
        {"judge.txt", "5d29191f2ec57835c877d656530e2891b2c26037d2f379d8de3381f8c76f84ad"},
    };
    for (const auto& [file, hash] : pinned) {
        EXPECT_EQ(sha256_hex(read_file(fs::path(FORGE_SOURCE_DIR) / "data/prompts" / file)), hash) << file;
        const auto id = template_from_string(file.substr(0, file.size() - 4));
        EXPECT_EQ(sha256_hex(prompt_template(id).body), hash) << file;
    }
}

TEST(Prompts, EmbeddedMatchesDataFiles) {
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(fs::path(FORGE_SOURCE_DIR) / "data/prompts")) {
        ++files;
        bool found = false;
        for (std::size_t i = 0; i < detail::kEmbeddedPromptCount; ++i) {
            if (detail::kEmbeddedPrompts[i].name == entry.path().filename().string()) {
                EXPECT_EQ(detail::kEmbeddedPrompts[i].text, read_file(entry.path()));
                found = true;
            }
        }
        EXPECT_TRUE(found) << entry.path();
    }
    EXPECT_EQ(files, detail::kEmbeddedPromptCount);
    EXPECT_EQ(files, 16u);
}

TEST(Prompts, SlotsPerTemplate) {
    using V = std::vector<std::string>;
    EXPECT_EQ(prompt_template(TemplateId::identification).slots(false), V{"word limit"});
    EXPECT_EQ(prompt_template(TemplateId::identification).slots(), (V{"word limit", "paper_text"}));
    EXPECT_EQ(prompt_template(TemplateId::internal_identification).slots(), (V{"word limit", "latex"}));
    EXPECT_EQ(prompt_template(TemplateId::judge).slots(), (V{"identified error texts", "ground truth error text"}));
    EXPECT_EQ(prompt_template(TemplateId::claim_extraction).slots(), V{"latex"});
    EXPECT_EQ(prompt_template(TemplateId::invalid_filter).slots(),
              (V{"claim", "original_text", "modified_text", "explanation", "latex"}));
    for (auto id : kAllTemplates) EXPECT_EQ(template_from_string(to_string(id)), id);
    EXPECT_THROW(template_from_string("review"), LookupError);
}

TEST(Prompts, RenderIsDeterministicAndSinglePass) {
    const auto& t = prompt_template(TemplateId::identification);
    const PromptVars vars{{"word limit", "42"}, {"paper_text", "text with {word limit} inside"}};
    const auto a = t.render(vars);
    EXPECT_EQ(a, t.render(vars));
    EXPECT_NE(a.find("at most 42 words long"), std::string::npos);
    EXPECT_NE(a.find("text with {word limit} inside"), std::string::npos);
    EXPECT_EQ(a.find("{word limit} words"), std::string::npos);
    EXPECT_EQ(t.render(vars, false).find("Text of the attached PDF"), std::string::npos);
    EXPECT_THROW(t.render({{"paper_text", "x"}}), ContractError);
    // Literal braces in the instructions survive.
    const auto g = prompt_template(TemplateId::error_generation).render({{"latex", "L"}, {"claim", "C"}});
    EXPECT_NE(g.find("including $, {, }, or spacing"), std::string::npos);
    EXPECT_TRUE(g.ends_with("Input LaTeX source:\nL\n\nKey claim:\nC\n")) << g.substr(g.size() - 60);
}

// ---- gateway + mock --------------------------------------------------------

namespace {

std::unique_ptr<Gateway> mock_gateway(json script, std::shared_ptr<AuditLog> audit = std::make_shared<AuditLog>()) {
    GatewayOptions o;
    o.sleep = [](std::chrono::milliseconds) {};
    auto g = std::make_unique<Gateway>(o, std::move(audit));
    g->register_provider("mock", std::make_shared<MockProvider>(std::move(script)));
    return g;
}

LlmRequest req(std::string model, std::string prompt, int max_retries = 1) {
    LlmRequest r;
    r.model_id = std::move(model);
    r.prompt = std::move(prompt);
    r.max_retries = max_retries;
    r.template_id = TemplateId::judge;
    return r;
}

}  // namespace

TEST(Gateway, MockAnswersByPromptHash) {
    auto g = mock_gateway({{"by_prompt_sha256", {{sha256_hex("H"), "A"}}}});
    const auto r = g->complete(req("mock:any", "H"));
    EXPECT_EQ(r.raw_text, "A");
    EXPECT_FALSE(r.refusal);
    EXPECT_EQ(r.attempts, 1);
}

TEST(Gateway, RefusesTwiceThenAnswers) {
    auto audit = std::make_shared<AuditLog>();
    auto g = mock_gateway({{"rules", json::array({{{"contains", "P"}, {"responses", json::array({json{{"refusal", true}}, json{{"policy_error", true}}, "fine"})}}})}}, audit);
    const auto r = g->complete(req("mock:m", "P", 2));
    EXPECT_EQ(r.raw_text, "fine");
    EXPECT_FALSE(r.refusal);
    EXPECT_EQ(r.attempts, 3);
    const auto records = audit->records();
    ASSERT_EQ(records.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(records[i]["attempt"], i + 1);
        EXPECT_EQ(records[i]["refusal"], i < 2);
        EXPECT_EQ(records[i]["prompt_sha256"], sha256_hex("P"));
        EXPECT_EQ(records[i]["model_id"], "mock:m");
        EXPECT_EQ(records[i]["template_id"], "judge");
        EXPECT_TRUE(records[i].contains("timestamp"));
    }
    EXPECT_EQ(records[2]["response_sha256"], sha256_hex("fine"));
}

TEST(Gateway, DefaultRetryBudgetIsOneRetry) {
    auto g = mock_gateway({{"default", {{"refusal", true}}}});
    const auto r = g->complete(req("mock:m", "x"));
    EXPECT_TRUE(r.refusal);
    EXPECT_EQ(r.attempts, 2);
}

TEST(Gateway, RefusalPhrases) {
    auto g = mock_gateway({{"default", "I\xE2\x80\x99m sorry, but I can\xE2\x80\x99t help with creating misleading research."}});
    EXPECT_TRUE(g->complete(req("mock:m", "x", 0)).refusal);
    RefusalDetector d({"no way"});
    EXPECT_TRUE(d.is_refusal("NO WAY jose"));
    EXPECT_FALSE(d.is_refusal(":error-text:\nwe cannot assist"));
    EXPECT_FALSE(RefusalDetector{}.is_refusal(":error-text:\nThe bound in Theorem 2 is wrong."));
}

TEST(Gateway, UnknownModelIsConfigError) {
    auto g = mock_gateway({{"default", "x"}});
    EXPECT_THROW(g->complete(req("nope", "p")), ConfigError);
    EXPECT_THROW(g->complete(req("other:model", "p")), ConfigError);
    EXPECT_THROW(g->complete(req("mock:", "p")), ConfigError);
    EXPECT_THROW(g->complete(req("mock:m", "")), ContractError);
}

TEST(Gateway, TransportRetriesWithBackoff) {
    std::vector<long> sleeps;
    GatewayOptions o;
    o.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); };
    o.backoff_base = std::chrono::milliseconds(100);
    Gateway g(o);
    json flaky = {{"rules", json::array({{{"contains", "flaky"}, {"responses", json::array({json{{"transport_error", true}}, json{{"transport_error", true}}, "ok"})}},
                                        {{"contains", "down"}, {"response", {{"transport_error", true}}}}})}};
    g.register_provider("mock", std::make_shared<MockProvider>(flaky));
    EXPECT_EQ(g.complete(req("mock:m", "flaky")).raw_text, "ok");
    EXPECT_EQ(sleeps, (std::vector<long>{100, 200}));
    sleeps.clear();
    EXPECT_THROW(g.complete(req("mock:m", "down")), TransportError);
    EXPECT_EQ(sleeps, (std::vector<long>{100, 200, 400}));
}

TEST(Gateway, MockLookupOrder) {
    json script = {{"by_prompt_sha256", {{sha256_hex("exact"), "by-hash"}}},
                   {"rules", json::array({{{"model", "mock:a"}, {"template", "judge"}, {"contains", json::array({"x", "y"})}, {"response", "rule"}}})},
                   {"sequence", json::array({"s1", "s2"})},
                   {"default", "dflt"}};
    auto g = mock_gateway(script);
    EXPECT_EQ(g->complete(req("mock:a", "exact")).raw_text, "by-hash");
    EXPECT_EQ(g->complete(req("mock:a", "x and y")).raw_text, "rule");
    EXPECT_EQ(g->complete(req("mock:b", "x and y")).raw_text, "s1");
    EXPECT_EQ(g->complete(req("mock:a", "just x")).raw_text, "s2");
    EXPECT_EQ(g->complete(req("mock:a", "just x")).raw_text, "dflt");
    auto strict = mock_gateway({{"rules", json::array()}});
    EXPECT_THROW(strict->complete(req("mock:a", "q")), LookupError);
}

TEST(Gateway, AuditFileIsJsonLines) {
    const auto path = fs::temp_directory_path() / ("forge-audit-" + std::to_string(std::random_device{}()) + ".jsonl");
    {
        auto audit = std::make_shared<AuditLog>(path, [] { return std::string("2025-01-01T00:00:00Z"); });
        auto g = mock_gateway({{"default", "r"}}, audit);
        g->complete(req("mock:m", "p1"));
        g->complete(req("mock:m", "p2"));
    }
    const auto lines = read_jsonl(path);
    fs::remove(path);
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0]["timestamp"], "2025-01-01T00:00:00Z");
    for (const char* key : {"template_id", "model_id", "prompt_sha256", "response_sha256", "refusal", "attempt", "timestamp"}) {
        EXPECT_TRUE(lines[1].contains(key)) << key;
    }
}

TEST(Gateway, ConcurrentCallsAreSafe) {
    auto audit = std::make_shared<AuditLog>();
    auto g = mock_gateway({{"default", "r"}}, audit);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) g->complete(req("mock:m", "p" + std::to_string(t * 100 + i)));
        });
    for (auto& t : threads) t.join();
    EXPECT_EQ(audit->records().size(), 400u);
    EXPECT_EQ(g->call_count(), 400u);
}

TEST(RateLimiter, SpacesCalls) {
    RateLimiter limiter(20.0, 1.0);
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 5; ++i) limiter.acquire();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    EXPECT_GE(elapsed, std::chrono::milliseconds(180));
    RateLimiter unlimited;
    for (int i = 0; i < 1000; ++i) unlimited.acquire();
}

// ---- http provider ---------------------------------------------------------

TEST(HttpProvider, ChatCompletionsRoundTrip) {
    httplib::Server server;
    int calls = 0;
    server.Post("/v1/chat/completions", [&](const httplib::Request& rq, httplib::Response& res) {
        ++calls;
        const auto body = json::parse(rq.body);
        EXPECT_EQ(rq.get_header_value("Authorization"), "Bearer k");
        const std::string prompt = body["messages"][0]["content"].is_string()
                                       ? body["messages"][0]["content"].get<std::string>()
                                       : body["messages"][0]["content"][1]["text"].get<std::string>();
        if (prompt == "busy") {
            res.status = 429;
            return;
        }
        if (prompt == "bad") {
            res.status = 400;
            res.set_content(R"({"error":{"code":"content_policy_violation"}})", "application/json");
            return;
        }
        if (prompt == "pdf") {
            EXPECT_EQ(body["messages"][0]["content"][0]["type"], "file");
            EXPECT_EQ(body["messages"][0]["content"][0]["file"]["file_data"], "data:application/pdf;base64,JVBERg==");
        }
        json out = {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", "echo:" + prompt + ":" + body["model"].get<std::string>()}}}, {"finish_reason", "stop"}}})}};
        res.set_content(out.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpProviderConfig cfg{"http://127.0.0.1:" + std::to_string(port) + "/v1", "k", true, 10};
    GatewayOptions o;
    o.sleep = [](std::chrono::milliseconds) {};
    Gateway g(o);
    g.register_provider("local", std::make_shared<HttpProvider>(cfg));
    EXPECT_EQ(g.complete(req("local:gpt-x", "hi")).raw_text, "echo:hi:gpt-x");
    auto pdf = req("local:gpt-x", "pdf");
    pdf.attachment_pdf = std::string("%PDF");
    EXPECT_EQ(g.complete(pdf).raw_text, "echo:pdf:gpt-x");
    EXPECT_TRUE(g.complete(req("local:m", "bad", 0)).refusal);
    calls = 0;
    EXPECT_THROW(g.complete(req("local:m", "busy")), TransportError);
    EXPECT_EQ(calls, 4);
    server.stop();
    t.join();
}

TEST(HttpProvider, FromEnv) {
    unsetenv("OPENAI_API_KEY");
    EXPECT_THROW(provider_from_env("openai"), EnvironmentError);
    setenv("OPENAI_API_KEY", "x", 1);
    EXPECT_NO_THROW(provider_from_env("openai"));
    unsetenv("OPENAI_API_KEY");
    EXPECT_THROW(provider_from_env("acme"), ConfigError);
    setenv("FORGE_ACME_BASE_URL", "http://localhost:1/v1", 1);
    setenv("FORGE_ACME_API_KEY", "y", 1);
    EXPECT_NO_THROW(provider_from_env("acme"));
    unsetenv("FORGE_ACME_BASE_URL");
    unsetenv("FORGE_ACME_API_KEY");
    EXPECT_EQ(base64_encode("hello"), "aGVsbG8=");
}

// ---- parsers ---------------------------------------------------------------

TEST(ParseClaims, Examples) {
    using V = std::vector<std::string>;
    EXPECT_EQ(parse_claims("1. A\n2. B"), (V{"A", "B"}));
    EXPECT_EQ(parse_claims("preamble\n1. Only claim"), V{"Only claim"});
    EXPECT_EQ(parse_claims("nothing numbered here"), V{});
    EXPECT_EQ(parse_claims("Claims:\n\n1. A\n\n2. B\n\nHope this helps."), (V{"A", "B"}));
    try {
        parse_claims("1. A\n3. C");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.raw(), "3. C");
    }
    EXPECT_THROW(parse_claims("1. A\n2. B\n1. again"), ParseError);
    EXPECT_THROW(parse_claims("2. starts late"), ParseError);
}

TEST(ParseGeneratedError, Examples) {
    const auto one = parse_generated_error(":original-text:\nThe bound is tight.\n\n:modified-text:\nThe bound is loose.\n\n:explanation:\nWeakens the claim.\n");
    ASSERT_EQ(one.pairs.size(), 1u);
    EXPECT_EQ(one.pairs[0].original_text, "The bound is tight.");
    EXPECT_EQ(one.pairs[0].modified_text, "The bound is loose.");
    EXPECT_EQ(one.explanation, "Weakens the claim.");

    const auto two = parse_generated_error(
        "Here you go.\n:original text:\nA1\n:modified text:\nB1\n\n:Original-Text: A2 line\nmore\n:modified-text:\nB2\n:explanation: why");
    ASSERT_EQ(two.pairs.size(), 2u);
    EXPECT_EQ(two.pairs[1].original_text, "A2 line\nmore");
    EXPECT_EQ(two.explanation, "why");

    EXPECT_THROW(parse_generated_error(":modified-text:\nB\n:explanation:\nx"), ParseError);
    EXPECT_THROW(parse_generated_error(":original-text:\nA\n:explanation:\nx"), ParseError);
    EXPECT_THROW(parse_generated_error(":original-text:\nA\n:modified-text:\nB\n"), ParseError);
    EXPECT_THROW(parse_generated_error(":original-text:\nA\n:modified-text:\nA\n:explanation:\nx"), ParseError);
    EXPECT_THROW(parse_generated_error(":original-text:\n\n:modified-text:\nA\n:explanation:\nx"), ParseError);
}

TEST(ParseGeneratedError, RoundTripProperty) {
    std::mt19937 rng(77);
    const std::vector<std::string> pieces{"We show", "$x^2 + 1$", "\\emph{tight}", "the bound", "{", "}", "holds.", "50\\%", "a:b"};
    auto text = [&](bool allow_empty) {
        std::uniform_int_distribution<int> lines(allow_empty ? 0 : 1, 3), words(1, 6), pick(0, static_cast<int>(pieces.size()) - 1);
        std::string out;
        const int n = lines(rng);
        for (int l = 0; l < n; ++l) {
            if (l) out += rng() % 4 == 0 ? "\n\n" : "\n";
            const int w = words(rng);
            for (int i = 0; i < w; ++i) out += (i ? " " : "") + pieces[pick(rng)];
        }
        return out;
    };
    for (int trial = 0; trial < 500; ++trial) {
        GeneratedError e;
        const int pairs = 1 + static_cast<int>(rng() % 3);
        for (int p = 0; p < pairs; ++p) e.pairs.push_back({text(false), text(true)});
        e.pairs[0].modified_text = e.pairs[0].original_text + " changed";
        e.explanation = text(false);
        ASSERT_EQ(parse_generated_error(serialize_generated_error(e)), e) << serialize_generated_error(e);
    }
}

TEST(ParseVerdict, Examples) {
    EXPECT_TRUE(parse_verdict("No changes required", kNoChangesRequired, kFilteringRequired));
    EXPECT_FALSE(parse_verdict("Filtering required", kNoChangesRequired, kFilteringRequired));
    EXPECT_TRUE(parse_verdict("  no   CHANGES\nrequired.", kNoChangesRequired, kFilteringRequired));
    try {
        parse_verdict("No changes required... Filtering required", kNoChangesRequired, kFilteringRequired);
        FAIL();
    } catch (const VerdictError& e) {
        EXPECT_NE(e.raw().find("Filtering"), std::string::npos);
    }
    EXPECT_THROW(parse_verdict("maybe", kNoChangesRequired, kFilteringRequired), VerdictError);
    // overlapping literals: the shorter inside the longer is not a second hit
    EXPECT_FALSE(parse_verdict("INCORRECTLY IDENTIFIED", "CORRECTLY IDENTIFIED", "INCORRECTLY IDENTIFIED"));
    EXPECT_TRUE(parse_verdict("CORRECTLY IDENTIFIED", "CORRECTLY IDENTIFIED", "INCORRECTLY IDENTIFIED"));
    EXPECT_THROW(parse_verdict("x", "same", "same"), ContractError);
}

TEST(ParseIdentification, Examples) {
    using V = std::vector<std::string>;
    EXPECT_EQ(parse_identification(":error-text:\nfirst\n\n:error text:\nsecond\n:error-text:\nthird\n:explanation:\nignored"),
              (V{"first", "second", "third"}));
    EXPECT_EQ(parse_identification("no blocks at all"), V{});
    std::string many;
    for (int i = 1; i <= 12; ++i) many += ":error-text:\nexcerpt " + std::to_string(i) + "\n\n";
    const auto parsed = parse_identification_detailed(many);
    ASSERT_EQ(parsed.excerpts.size(), 10u);
    EXPECT_EQ(parsed.excerpts.back(), "excerpt 10");
    EXPECT_EQ(parsed.dropped, 2u);
    EXPECT_EQ(parse_identification("1 :error text: inline excerpt\n2 :error text:\nnext"), (V{"inline excerpt", "next"}));
    EXPECT_EQ(parse_identification("**:error-text:**\nbold tag"), V{"bold tag"});
}

TEST(ParseJudge, Examples) {
    EXPECT_EQ(parse_judge("x CORRECTLY IDENTIFIED y INCORRECTLY IDENTIFIED", 2), (std::vector<bool>{true, false}));
    const auto padded = parse_judge_detailed("CORRECTLY IDENTIFIED\nINCORRECTLY IDENTIFIED", 3);
    EXPECT_EQ(padded.verdicts, (std::vector<bool>{true, false, false}));
    EXPECT_EQ(padded.markers, 2u);
    EXPECT_THROW(parse_judge("nothing here", 2), ParseError);
    EXPECT_EQ(parse_judge("CORRECTLY IDENTIFIED CORRECTLY IDENTIFIED", 1), std::vector<bool>{true});
    EXPECT_THROW(parse_judge("CORRECTLY IDENTIFIED", 0), ContractError);
}

TEST(ParseLocalization, CategoryAndExcerpts) {
    const auto l = parse_localization("Category: 3. Error in implementation (eg., wrong concept)\n\nerror: first excerpt\nspans lines\nerror:\nsecond\n");
    EXPECT_EQ(l.category, "Error in implementation");
    EXPECT_EQ(l.excerpts, (std::vector<std::string>{"first excerpt\nspans lines", "second"}));
    EXPECT_EQ(parse_localization("5\nerror: x").category, "Error in assumptions");
    EXPECT_EQ(parse_localization("Error in algorithm/proof\nError: y").excerpts, std::vector<std::string>{"y"});
    EXPECT_EQ(parse_localization("Error in algorithm/proof\nError: y").category, "Error in algorithm/proof");
    EXPECT_EQ(parse_localization("error: z").category, "");
    EXPECT_THROW(parse_localization("no marker"), ParseError);
}
