#include "ptdmon/benchgen.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <string>
#include <vector>

namespace ptdmon::benchgen {

namespace {

long uniform(std::mt19937_64& rng, long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

model::Event make_event(std::string action, long ts, std::vector<model::Value> args) {
    model::Event ev;
    ev.action = std::move(action);
    ev.timestamp = ts;
    ev.args = std::move(args);
    return ev;
}

// Variable updates with integer values; non-b updates are usually copied to b
// a little later, so both satisfied and violated parameter regions occur.
model::TimedDataWord gen_copy(const GenConfig& cfg, std::mt19937_64& rng) {
    static const char* names[] = {"a", "b", "c"};
    model::TimedDataWord word;
    using Echo = std::pair<long, long>;  // (time, value)
    std::priority_queue<Echo, std::vector<Echo>, std::greater<>> echoes;
    long t = 0;
    while (word.size() < cfg.length) {
        while (!echoes.empty() && echoes.top().first <= t && word.size() < cfg.length) {
            auto [et, ev] = echoes.top();
            echoes.pop();
            word.push_back(make_event("update", et, {std::string("b"), std::to_string(ev)}));
        }
        if (word.size() >= cfg.length) break;
        std::string name = names[rng() % 3];
        long value = uniform(rng, 0, 9);
        word.push_back(make_event("update", t, {name, std::to_string(value)}));
        if (name != "b" && rng() % 100 < cfg.echo_percent)
            echoes.emplace(t + uniform(rng, 1, cfg.max_echo_delay), value);
        t += uniform(rng, 1, cfg.max_gap);
    }
    std::stable_sort(word.begin(), word.end(),
                     [](const model::Event& a, const model::Event& b) { return a.timestamp < b.timestamp; });
    return word;
}

model::TimedDataWord gen_dominant(const GenConfig& cfg, std::mt19937_64& rng) {
    std::vector<std::string> users;
    for (unsigned i = 0; i < cfg.users; ++i) users.push_back("user" + std::to_string(i + 1));
    model::TimedDataWord word;
    long t = 0;
    while (word.size() < cfg.length) {
        const std::string& user = users[rng() % users.size()];
        Rational amount(uniform(rng, cfg.min_amount, cfg.max_amount));
        word.push_back(make_event("withdraw", t, {user, amount}));
        t += uniform(rng, 1, 10);
    }
    return word;
}

model::TimedDataWord gen_periodic(const GenConfig& cfg, std::mt19937_64& rng) {
    struct Stream {
        long period, period_jitter, amount, amount_jitter;
        long next = 0;
    };
    Stream streams[3] = {{5, 1, 50, 3}, {50, 3, 1000, 40}, {100, 5, 5000, 20}};
    std::mt19937_64 rngs[3] = {std::mt19937_64(rng()), std::mt19937_64(rng()), std::mt19937_64(rng())};
    for (int i = 0; i < 3; ++i)
        streams[i].next = streams[i].period + uniform(rngs[i], -streams[i].period_jitter,
                                                      streams[i].period_jitter);
    model::TimedDataWord word;
    while (word.size() < cfg.length) {
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (streams[i].next < streams[k].next) k = i;
        Stream& s = streams[k];
        Rational amount(s.amount + uniform(rngs[k], -s.amount_jitter, s.amount_jitter));
        word.push_back(make_event("withdraw", s.next, {amount}));
        s.next += s.period + uniform(rngs[k], -s.period_jitter, s.period_jitter);
    }
    return word;
}

}  // namespace

model::TimedDataWord generate(const GenConfig& cfg) {
    if (cfg.length == 0) throw ConfigError("log length must be positive");
    std::mt19937_64 rng(cfg.seed);
    switch (cfg.benchmark) {
        case Benchmark::Copy: return gen_copy(cfg, rng);
        case Benchmark::Dominant: return gen_dominant(cfg, rng);
        default: return gen_periodic(cfg, rng);
    }
}

}  // namespace ptdmon::benchgen
