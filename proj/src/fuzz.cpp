#include "revinv/fuzz.hpp"

#include "revinv/error.hpp"
#include "revinv/util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>

namespace revinv::fuzz {

namespace {

constexpr const char* kModule = "fuzz";
constexpr Word32 kZeroWord{};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

template <std::size_t N>
std::string hex(const std::array<std::uint8_t, N>& bytes) {
    std::string out = "0x";
    for (auto b : bytes) out += fmt::format("{:02x}", b);
    return out;
}

std::string hex(const std::string& bytes) {
    std::string out = "0x";
    for (unsigned char b : bytes) out += fmt::format("{:02x}", b);
    return out;
}

template <class K, class V>
V read(const std::map<K, V>& m, const K& key) {
    auto it = m.find(key);
    return it == m.end() ? V{} : it->second;
}

Word32 word_of(std::uint8_t fill) {
    Word32 w;
    w.fill(fill);
    return w;
}

Word32 word_one() {
    Word32 w{};
    w[31] = 1;
    return w;
}

template <std::size_t N>
std::array<std::uint8_t, N> random_bytes(Rng& rng) {
    std::array<std::uint8_t, N> out{};
    for (auto& b : out) b = static_cast<std::uint8_t>(rng.next() >> 56);
    return out;
}

std::string random_message(Rng& rng) {
    std::string m(rng.below(kMaxMessageBytes + 1), '\0');
    for (auto& c : m) c = static_cast<char>(rng.next() >> 56);
    return m;
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& pool) {
    return pool[rng.below(pool.size())];
}

}  // namespace

std::string_view to_string(Model model) { return model == Model::Patched ? "patched" : "vulnerable"; }
std::string_view to_string(Outcome outcome) { return outcome == Outcome::Ok ? "ok" : "reverted"; }

Word32 message_hash(const std::string& message) {
    Word32 out;
    sha256({reinterpret_cast<const std::uint8_t*>(message.data()), message.size()}, out);
    return out;
}

StepResult step(const BridgeState& state, const Action& action, Model model) {
    StepResult r{state, Outcome::Reverted};
    BridgeState& s = r.state;
    std::visit(overloaded{
                   [&](const Upgrade& u) {
                       if (model == Model::Patched && u.root == kZeroWord) return;
                       if (u.confirm_at == 0) {
                           s.committed.erase(u.root);
                       } else {
                           s.committed[u.root] = u.confirm_at;
                       }
                       s.current_root = u.root;
                       r.outcome = Outcome::Ok;
                   },
                   [&](const Prove& p) {
                       if (read(s.committed, s.current_root) == 0) return;
                       const Word32 h = message_hash(p.message);
                       if (s.current_root == kZeroWord) {
                           s.proven.erase(h);
                       } else {
                           s.proven[h] = s.current_root;
                       }
                       r.outcome = Outcome::Ok;
                   },
                   [&](const Process& p) {
                       const Word32 h = message_hash(p.message);
                       const Word32 root = read(s.proven, h);
                       if (read(s.committed, root) == 0) return;
                       if (root == kZeroWord) s.ghost_unproven_process_succeeded = true;
                       s.processed.insert(h);
                       r.outcome = Outcome::Ok;
                   },
               },
               action.call);
    return r;
}

bool oracle(const BridgeState& state) { return !state.ghost_unproven_process_succeeded; }

Trace replay(const std::vector<Action>& actions, Model model) {
    Trace t;
    BridgeState state;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        auto r = step(state, actions[i], model);
        state = std::move(r.state);
        t.actions.push_back(actions[i]);
        t.outcomes.push_back(r.outcome);
        if (!oracle(state)) {
            t.violation_step = i;
            break;
        }
    }
    return t;
}

bool violates(const std::vector<Action>& actions, Model model) {
    return replay(actions, model).violation_step.has_value();
}

namespace {

bool delete_steps(std::vector<Action>& seq, Model model) {
    bool changed = false;
    for (std::size_t i = 0; i < seq.size();) {
        auto trial = seq;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        if (violates(trial, model)) {
            seq = std::move(trial);
            changed = true;
        } else {
            ++i;
        }
    }
    return changed;
}

// Candidates are tried in order; the first that keeps the failure is taken.
template <class Get, class Set, class T>
bool try_values(std::vector<Action>& seq, std::size_t i, Model model, Get get, Set set,
                const std::vector<T>& candidates) {
    for (const auto& c : candidates) {
        if (!(c < get(seq[i])) && !(get(seq[i]) < c)) return false;
        auto trial = seq;
        set(trial[i], c);
        if (violates(trial, model)) {
            seq = std::move(trial);
            return true;
        }
    }
    return false;
}

std::vector<std::uint64_t> integer_candidates(std::uint64_t v) {
    std::vector<std::uint64_t> out{0, 1};
    for (std::uint64_t h = v / 2; h > 1; h /= 2) out.push_back(h);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> message_candidates(const std::string& m) {
    std::vector<std::string> out{""};
    for (std::size_t len = 1; len < m.size(); len *= 2) out.push_back(m.substr(0, len));
    return out;
}

bool minimize_arguments(std::vector<Action>& seq, Model model) {
    bool changed = false;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        bool progress = true;
        while (progress) {
            progress = false;
            if (std::holds_alternative<Upgrade>(seq[i].call)) {
                auto get_root = [](const Action& a) { return std::get<Upgrade>(a.call).root; };
                auto set_root = [](Action& a, const Word32& w) { std::get<Upgrade>(a.call).root = w; };
                progress |= try_values(seq, i, model, get_root, set_root, std::vector<Word32>{kZeroWord});
                auto get_int = [](const Action& a) { return std::get<Upgrade>(a.call).confirm_at; };
                auto set_int = [](Action& a, std::uint64_t v) { std::get<Upgrade>(a.call).confirm_at = v; };
                progress |= try_values(seq, i, model, get_int, set_int, integer_candidates(get_int(seq[i])));
            } else {
                auto get_msg = [](const Action& a) {
                    return std::visit(overloaded{[](const Upgrade&) { return std::string(); },
                                                 [](const auto& p) { return p.message; }},
                                      a.call);
                };
                auto set_msg = [](Action& a, const std::string& m) {
                    std::visit(overloaded{[](Upgrade&) {}, [&](auto& p) { p.message = m; }}, a.call);
                };
                progress |= try_values(seq, i, model, get_msg, set_msg, message_candidates(get_msg(seq[i])));
            }
            auto get_sender = [](const Action& a) { return a.sender; };
            auto set_sender = [](Action& a, const Address& s) { a.sender = s; };
            progress |= try_values(seq, i, model, get_sender, set_sender, std::vector<Address>{Address{}});
            changed |= progress;
        }
    }
    return changed;
}

}  // namespace

std::vector<Action> shrink(std::vector<Action> actions, Model model) {
    if (!violates(actions, model)) throw ArgumentError(kModule, "shrink needs a failing sequence");
    const auto t = replay(actions, model);
    actions.resize(*t.violation_step + 1);
    while (true) {
        const bool deleted = delete_steps(actions, model);
        const bool minimized = minimize_arguments(actions, model);
        if (!deleted && !minimized) break;
    }
    return actions;
}

Dictionary dictionary(std::uint64_t seed) {
    Dictionary d;
    d.roots = {kZeroWord, word_one(), word_of(0xff)};
    d.integers = {0, 1, 2, 3, std::numeric_limits<std::uint64_t>::max()};
    d.messages = {"", "m"};
    Rng rng(mix_seed(seed, std::string_view("dictionary")));
    for (int i = 0; i < 2; ++i) {
        std::string m(1 + rng.below(32), '\0');
        for (auto& c : m) c = static_cast<char>(rng.next() >> 56);
        d.messages.push_back(std::move(m));
    }
    Address one{};
    one[19] = 1;
    d.senders = {Address{}, one};
    return d;
}

std::vector<Action> generate_sequence(std::uint64_t seed, std::size_t run, std::size_t max_len) {
    const Dictionary dict = dictionary(seed);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(run)));
    const std::size_t len = 1 + rng.below(max_len);
    std::vector<Action> seq;
    seq.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        Action a;
        const auto kind = rng.below(3);
        if (kind == 0) {
            Upgrade u;
            u.root = rng.coin() ? pick(rng, dict.roots) : random_bytes<32>(rng);
            u.confirm_at = rng.coin() ? pick(rng, dict.integers) : rng.next();
            a.call = u;
        } else {
            std::string m = rng.coin() ? pick(rng, dict.messages) : random_message(rng);
            if (kind == 1) {
                a.call = Prove{std::move(m)};
            } else {
                a.call = Process{std::move(m)};
            }
        }
        a.sender = rng.coin() ? pick(rng, dict.senders) : random_bytes<20>(rng);
        seq.push_back(std::move(a));
    }
    return seq;
}

Verdict fuzz_campaign(const CampaignOptions& options) {
    if (options.runs == 0) throw ArgumentError(kModule, "runs must be >= 1");
    if (options.max_len == 0) throw ArgumentError(kModule, "max_len must be >= 1");
    Verdict v;
    for (std::size_t run = 0; run < options.runs; ++run) {
        ++v.runs_executed;
        auto seq = generate_sequence(options.seed, run, options.max_len);
        const auto t = replay(seq, options.model);
        if (!t.violation_step) continue;
        v.passed = false;
        v.failing_run = run;
        v.original = t.actions;
        v.counterexample = shrink(t.actions, options.model);
        break;
    }
    return v;
}

ExhaustiveResult exhaustive_check(std::size_t max_len, Model model) {
    const Dictionary dict = dictionary(0);
    std::vector<Action> pool;
    for (const auto& r : dict.roots) {
        for (auto c : dict.integers) pool.push_back({Upgrade{r, c}, {}});
    }
    for (const auto& m : dict.messages) {
        pool.push_back({Prove{m}, {}});
        pool.push_back({Process{m}, {}});
    }

    ExhaustiveResult out;
    std::vector<std::size_t> idx;
    for (std::size_t len = 1; len <= max_len; ++len) {
        idx.assign(len, 0);
        while (true) {
            std::vector<Action> seq;
            seq.reserve(len);
            for (auto k : idx) seq.push_back(pool[k]);
            ++out.sequences;
            if (!out.counterexample && violates(seq, model)) out.counterexample = seq;
            std::size_t pos = len;
            while (pos > 0 && ++idx[pos - 1] == pool.size()) idx[--pos] = 0;
            if (pos == 0) break;
        }
    }
    return out;
}

std::string describe(const Action& action) {
    return std::visit(overloaded{
                          [](const Upgrade& u) { return fmt::format("Upgrade({}, {})", hex(u.root), u.confirm_at); },
                          [](const Prove& p) { return fmt::format("Prove({})", hex(p.message)); },
                          [](const Process& p) { return fmt::format("Process({})", hex(p.message)); },
                      },
                      action.call);
}

nlohmann::ordered_json action_to_json(const Action& action) {
    nlohmann::ordered_json j;
    std::visit(overloaded{
                   [&](const Upgrade& u) {
                       j["action"] = "Upgrade";
                       j["root"] = hex(u.root);
                       j["confirm_at"] = u.confirm_at;
                   },
                   [&](const Prove& p) {
                       j["action"] = "Prove";
                       j["message"] = hex(p.message);
                       j["message_hash"] = hex(message_hash(p.message));
                   },
                   [&](const Process& p) {
                       j["action"] = "Process";
                       j["message"] = hex(p.message);
                       j["message_hash"] = hex(message_hash(p.message));
                   },
               },
               action.call);
    j["sender"] = hex(action.sender);
    return j;
}

nlohmann::ordered_json verdict_to_json(const Verdict& verdict, const CampaignOptions& options) {
    nlohmann::ordered_json j;
    j["verdict"] = verdict.passed ? "PASS" : "FAIL";
    j["seed"] = options.seed;
    j["runs"] = options.runs;
    j["max_len"] = options.max_len;
    j["model"] = std::string(to_string(options.model));
    j["hash"] = kHashName;
    j["runs_executed"] = verdict.runs_executed;
    if (verdict.passed) return j;

    j["failing_run"] = *verdict.failing_run;
    j["original_length"] = verdict.original.size();
    j["counterexample"] = nlohmann::ordered_json::array();
    BridgeState state;
    std::optional<std::size_t> flipped;
    for (std::size_t i = 0; i < verdict.counterexample.size(); ++i) {
        const auto r = step(state, verdict.counterexample[i], options.model);
        auto e = action_to_json(verdict.counterexample[i]);
        e["outcome"] = std::string(to_string(r.outcome));
        e["ghost_unproven_process_succeeded"] = r.state.ghost_unproven_process_succeeded;
        if (!flipped && !oracle(r.state)) flipped = i + 1;
        state = r.state;
        j["counterexample"].push_back(std::move(e));
    }
    if (flipped) j["ghost_set_at_step"] = *flipped;
    return j;
}

}  // namespace revinv::fuzz
