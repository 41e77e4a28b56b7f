#include <doctest.h>

#include <map>

#include "ptdmon/benchgen.hpp"
#include "ptdmon/io.hpp"

using namespace ptdmon;

namespace {

std::string render(const model::TimedDataWord& word) {
    std::string out;
    for (const auto& ev : word) out += io::render_event(ev) + "\n";
    return out;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
    benchgen::GenConfig cfg;
    cfg.length = 200;
    cfg.seed = 42;
    for (auto bench : {benchgen::Benchmark::Copy, benchgen::Benchmark::Dominant,
                       benchgen::Benchmark::Periodic}) {
        cfg.benchmark = bench;
        CHECK(render(benchgen::generate(cfg)) == render(benchgen::generate(cfg)));
    }
    cfg.benchmark = benchgen::Benchmark::Dominant;
    cfg.seed = 43;
    benchgen::GenConfig other = cfg;
    other.seed = 44;
    CHECK(render(benchgen::generate(cfg)) != render(benchgen::generate(other)));
}

TEST_CASE("zero-length configurations are rejected") {
    benchgen::GenConfig cfg;
    cfg.length = 0;
    CHECK_THROWS_AS(benchgen::generate(cfg), benchgen::ConfigError);
}

TEST_CASE("dominant: inter-arrival gaps follow the uniform {1..10} draw") {
    benchgen::GenConfig cfg;
    cfg.benchmark = benchgen::Benchmark::Dominant;
    cfg.length = 5;
    cfg.seed = 1;
    auto word = benchgen::generate(cfg);
    REQUIRE(word.size() == 5);
    for (std::size_t i = 1; i < word.size(); ++i) {
        Rational gap = word[i].timestamp - word[i - 1].timestamp;
        CHECK(gap >= 1);
        CHECK(gap <= 10);
    }
    for (const auto& ev : word) {
        CHECK(ev.action == "withdraw");
        Rational amount = std::get<Rational>(ev.args[1]);
        CHECK(amount >= 1);
        CHECK(amount <= 100);
    }
}

TEST_CASE("periodic: the short-period stream keeps its gap and amount bands") {
    benchgen::GenConfig cfg;
    cfg.benchmark = benchgen::Benchmark::Periodic;
    cfg.length = 12;
    cfg.seed = 7;
    auto word = benchgen::generate(cfg);
    REQUIRE(word.size() == 12);
    Rational prev = -1;
    std::size_t short_events = 0;
    for (const auto& ev : word) {
        CHECK(ev.timestamp >= 0);
        Rational amount = std::get<Rational>(ev.args[0]);
        if (amount >= 47 && amount <= 53) {
            if (prev >= 0) {
                Rational gap = ev.timestamp - prev;
                CHECK(gap >= 4);
                CHECK(gap <= 6);
            }
            prev = ev.timestamp;
            ++short_events;
        } else {
            CHECK(((amount >= 960 && amount <= 1040) || (amount >= 4980 && amount <= 5020)));
        }
    }
    CHECK(short_events >= 8);
    for (std::size_t i = 1; i < word.size(); ++i) CHECK(word[i].timestamp >= word[i - 1].timestamp);
}

TEST_CASE("copy: names, values, gaps, and echoes stay in range") {
    benchgen::GenConfig cfg;
    cfg.benchmark = benchgen::Benchmark::Copy;
    cfg.length = 300;
    cfg.seed = 5;
    auto word = benchgen::generate(cfg);
    REQUIRE(word.size() == 300);
    bool saw_b = false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        const auto& name = std::get<std::string>(word[i].args[0]);
        CHECK((name == "a" || name == "b" || name == "c"));
        saw_b |= name == "b";
        const auto& value = std::get<std::string>(word[i].args[1]);
        CHECK(value.size() == 1);
        CHECK(value[0] >= '0');
        CHECK(value[0] <= '9');
        if (i) CHECK(word[i].timestamp >= word[i - 1].timestamp);
    }
    CHECK(saw_b);
}

TEST_CASE("distribution sanity on large samples") {
    benchgen::GenConfig cfg;
    cfg.length = 10000;
    cfg.seed = 99;

    cfg.benchmark = benchgen::Benchmark::Dominant;
    auto dom = benchgen::generate(cfg);
    double mean = 0;
    for (std::size_t i = 1; i < dom.size(); ++i)
        mean += Rational(dom[i].timestamp - dom[i - 1].timestamp).get_d();
    mean /= static_cast<double>(dom.size() - 1);
    CHECK(mean > 5.5 * 0.9);
    CHECK(mean < 5.5 * 1.1);

    cfg.benchmark = benchgen::Benchmark::Periodic;
    auto per = benchgen::generate(cfg);
    std::map<int, std::pair<double, std::size_t>> gaps;  // class -> (sum, count)
    std::map<int, Rational> prev;
    for (const auto& ev : per) {
        Rational amount = std::get<Rational>(ev.args[0]);
        int cls = amount <= 53 ? 0 : (amount <= 1040 ? 1 : 2);
        if (prev.count(cls)) {
            gaps[cls].first += Rational(ev.timestamp - prev[cls]).get_d();
            gaps[cls].second += 1;
        }
        prev[cls] = ev.timestamp;
    }
    const double expected[3] = {5.0, 50.0, 100.0};
    for (int cls = 0; cls < 3; ++cls) {
        REQUIRE(gaps[cls].second > 50);
        double m = gaps[cls].first / static_cast<double>(gaps[cls].second);
        CHECK(m > expected[cls] * 0.9);
        CHECK(m < expected[cls] * 1.1);
    }

    cfg.benchmark = benchgen::Benchmark::Copy;
    auto cp = benchgen::generate(cfg);
    // Base updates arrive every 3 time units on average; echoes compress the
    // observed mean, so only a loose band is checked here.
    double total = Rational(cp.back().timestamp - cp.front().timestamp).get_d();
    CHECK(total / static_cast<double>(cp.size()) > 0.5);
    CHECK(total / static_cast<double>(cp.size()) < 3.5);
}
