#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tarag/errors.hpp"
#include "tarag/providers.hpp"
#include "tarag/vector_index.hpp"

using namespace tarag;
using nlohmann::json;

namespace {

double norm_of(const std::vector<float>& v) {
    double s = 0;
    for (float x : v) s += double(x) * x;
    return std::sqrt(s);
}

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += double(a[i]) * b[i];
    return s / (norm_of(a) * norm_of(b));
}

}  // namespace

TEST_CASE("stub embedder: determinism, unit norm, dimension") {
    StubEmbedder e(64);
    CHECK(e.dim() == 64);
    auto a = e.embed_one("Apple stock price trend in 2015");
    auto b = e.embed_one("Apple stock price trend in 2015");
    CHECK(a == b);
    CHECK(a.size() == 64);
    CHECK(norm_of(a) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("stub embedder: shared tokens raise similarity, disjoint tokens stay near zero") {
    StubEmbedder e;
    auto base = e.embed_one("apple quarterly revenue growth");
    auto related = e.embed_one("apple quarterly revenue forecast");
    auto unrelated = e.embed_one("volcanic eruption seismic magma observatory");
    CHECK(cosine(base, related) > cosine(base, unrelated));
    // Signed hashing keeps expected cross-similarity of token-disjoint texts
    // near zero; allow generous slack for a single draw.
    std::mt19937 rng(307);
    std::vector<std::string> wordsA = {"gamma", "oxide", "lattice", "proton", "jungle",
                                       "violin", "harbor", "nickel", "sprint", "meadow"};
    std::vector<std::string> wordsB = {"quartz", "ballad", "copper", "thermal", "osprey",
                                       "fjord", "saddle", "pixel", "mosaic", "ember"};
    double total = 0;
    int n = 50;
    for (int i = 0; i < n; ++i) {
        std::shuffle(wordsA.begin(), wordsA.end(), rng);
        std::shuffle(wordsB.begin(), wordsB.end(), rng);
        std::string ta = wordsA[0] + " " + wordsA[1] + " " + wordsA[2] + " " + wordsA[3];
        std::string tb = wordsB[0] + " " + wordsB[1] + " " + wordsB[2] + " " + wordsB[3];
        total += cosine(e.embed_one(ta), e.embed_one(tb));
    }
    // Collisions across 36 signed general buckets leave a small residual.
    CHECK(std::abs(total / n) <= 0.1);
}

TEST_CASE("stub embedder: calendar tokens land in dedicated buckets") {
    StubEmbedder e(64);
    const std::size_t general = 64 - 16 - 12;

    // A lone year token occupies exactly its (year - 1900) mod 16 bucket.
    auto y2015 = e.embed_one("2015");
    CHECK(y2015[general + (2015 - 1900) % 16] == doctest::Approx(1.0f));
    auto y2016 = e.embed_one("2016");
    CHECK(y2016[general + (2016 - 1900) % 16] == doctest::Approx(1.0f));
    CHECK(cosine(y2015, y2016) == doctest::Approx(0.0));

    // Month names own dedicated buckets past the year region.
    auto jan = e.embed_one("January");
    CHECK(jan[general + 16 + 0] == doctest::Approx(1.0f));
    auto dec = e.embed_one("december");
    CHECK(dec[general + 16 + 11] == doctest::Approx(1.0f));
    CHECK(cosine(jan, dec) == doctest::Approx(0.0));

    // Same month in different years: month bucket shared, year buckets not.
    auto jan15 = e.embed_one("January 2015");
    auto jan16 = e.embed_one("January 2016");
    auto feb15 = e.embed_one("February 2015");
    CHECK(cosine(jan15, jan16) == doctest::Approx(0.5));
    CHECK(cosine(jan15, feb15) == doctest::Approx(0.5));
    CHECK(cosine(jan16, feb15) == doctest::Approx(0.0));
}

TEST_CASE("embed_texts validates and normalizes") {
    StubEmbedder e;
    CHECK_THROWS_AS(embed_texts(e, {"ok", ""}), EmptyText);
    CHECK_THROWS_AS(embed_texts(e, {"   \t\n"}), EmptyText);
    auto out = embed_texts(e, {"one", "two", "three"});
    REQUIRE(out.size() == 3);
    for (const auto& v : out) CHECK(norm_of(v) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(out[0] == e.embed_one("one"));
}

TEST_CASE("hypothetical embedding equals the hand-computed normalized mean") {
    StubEmbedder e;
    std::string q = "Apple stock price trend";
    std::vector<Date> anchors = {{2015, 1, 1}, {2016, 1, 1}, {2017, 1, 1}};
    auto got = build_hypothetical_embedding(e, q, anchors, Granularity::Year);

    // Oracle: embed each rendered variant, normalize, average, renormalize.
    std::vector<double> mean(e.dim(), 0.0);
    for (const auto& a : anchors) {
        auto v = e.embed_one(render_anchor(a, Granularity::Year, q));
        double n = norm_of(v);
        for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i] / n;
    }
    double n = 0;
    for (double x : mean) n += x * x;
    n = std::sqrt(n);
    REQUIRE(got.size() == mean.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(mean[i] / n).epsilon(1e-4));
    CHECK(norm_of(got) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("hypothetical embedding: single anchor and permutation invariance") {
    StubEmbedder e;
    std::string q = "central bank interest rate";
    auto single = build_hypothetical_embedding(e, q, {{2019, 3, 1}}, Granularity::Month);
    auto direct = e.embed_one(render_anchor({2019, 3, 1}, Granularity::Month, q));
    for (std::size_t i = 0; i < single.size(); ++i)
        CHECK(single[i] == doctest::Approx(direct[i]).epsilon(1e-5));

    std::vector<Date> fwd = {{2014, 1, 1}, {2015, 1, 1}, {2016, 1, 1}, {2017, 1, 1}};
    std::vector<Date> rev(fwd.rbegin(), fwd.rend());
    auto a = build_hypothetical_embedding(e, q, fwd, Granularity::Year);
    auto b = build_hypothetical_embedding(e, q, rev, Granularity::Year);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-5));
}

TEST_CASE("hypothetical embedding rejects empty anchor lists") {
    StubEmbedder e;
    CHECK_THROWS_AS(build_hypothetical_embedding(e, "q", {}, Granularity::Year),
                    std::invalid_argument);
}

TEST_CASE("stub llm picks the first matching rule") {
    StubLlm llm({{"alpha", "one"}, {"beta", "two"}}, "none");
    CHECK(llm.complete("has beta inside") == "two");
    CHECK(llm.complete("alpha and beta both") == "one");
    CHECK(llm.complete("nothing") == "none");
}

TEST_CASE("remote providers speak the JSON contract and retry on failure") {
    httplib::Server server;
    std::atomic<int> embed_calls{0}, chat_calls{0}, flaky_calls{0};

    server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        ++embed_calls;
        auto body = json::parse(req.body);
        REQUIRE(body.at("model") == "test-embed");
        json data = json::array();
        for (const auto& text : body.at("input")) {
            // Deterministic per-text vector: [len, 1, 0].
            data.push_back({{"embedding", {double(text.get<std::string>().size()), 1.0, 0.0}}});
        }
        res.set_content(json{{"data", data}}.dump(), "application/json");
    });
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++chat_calls;
        auto body = json::parse(req.body);
        REQUIRE(body.at("model") == "test-chat");
        REQUIRE(body.at("messages").at(0).at("content").get<std::string>().find("ping") !=
                std::string::npos);
        res.set_content(
            json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "pong"}}}}}}}.dump(),
            "application/json");
    });
    server.Post("/flaky/v1/embeddings", [&](const httplib::Request&, httplib::Response& res) {
        if (++flaky_calls < 3) {
            res.status = 500;
            return;
        }
        res.set_content(json{{"data", {{{"embedding", {1.0, 0.0, 0.0}}}}}}.dump(),
                        "application/json");
    });
    server.Post("/dead/v1/embeddings", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
    });

    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread runner([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    std::string endpoint = "http://127.0.0.1:" + std::to_string(port);

    {
        RemoteEmbedder::Options o;
        o.endpoint = endpoint;
        o.model = "test-embed";
        o.dim = 3;
        o.batch_size = 2;
        RemoteEmbedder emb(o);
        auto out = emb.embed({"ab", "abcd", "a"});
        REQUIRE(out.size() == 3);
        CHECK(out[0] == std::vector<float>{2, 1, 0});
        CHECK(out[1] == std::vector<float>{4, 1, 0});
        CHECK(out[2] == std::vector<float>{1, 1, 0});
        CHECK(embed_calls == 2);  // batch size 2 splits 3 texts into 2 calls
    }
    {
        RemoteLlm::Options o;
        o.endpoint = endpoint;
        o.model = "test-chat";
        RemoteLlm llm(o);
        CHECK(llm.complete("ping") == "pong");
        CHECK(chat_calls == 1);
    }
    {
        RemoteEmbedder::Options o;
        o.endpoint = endpoint;
        o.path = "/flaky/v1/embeddings";
        o.model = "test-embed";
        o.dim = 3;
        o.retry.initial_backoff_ms = 1;
        RemoteEmbedder emb(o);
        auto out = emb.embed({"x"});
        REQUIRE(out.size() == 1);
        CHECK(flaky_calls == 3);  // two failures, success on the final attempt
    }
    {
        RemoteEmbedder::Options o;
        o.endpoint = endpoint;
        o.path = "/dead/v1/embeddings";
        o.model = "test-embed";
        o.dim = 3;
        o.retry.initial_backoff_ms = 1;
        RemoteEmbedder emb(o);
        CHECK_THROWS_AS(emb.embed({"x"}), ProviderUnavailable);
    }

    server.stop();
    runner.join();
}
