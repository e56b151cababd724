#pragma once

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace revinv::fuzz {

using Word32 = std::array<std::uint8_t, 32>;
using Address = std::array<std::uint8_t, 20>;

/// Message-bridge model with a trusted-root table. Absent mapping keys read
/// as zero, like contract storage.
struct BridgeState {
    std::map<Word32, std::uint64_t> committed;  // root -> confirm_at
    std::map<Word32, Word32> proven;            // message hash -> root
    std::set<Word32> processed;
    Word32 current_root{};
    bool ghost_unproven_process_succeeded = false;

    bool operator==(const BridgeState&) const = default;
};

struct Upgrade {
    Word32 root{};
    std::uint64_t confirm_at = 0;
    bool operator==(const Upgrade&) const = default;
};
struct Prove {
    std::string message;  // raw bytes
    bool operator==(const Prove&) const = default;
};
struct Process {
    std::string message;
    bool operator==(const Process&) const = default;
};

struct Action {
    std::variant<Upgrade, Prove, Process> call;
    Address sender{};
    bool operator==(const Action&) const = default;
};

enum class Outcome { Ok, Reverted };

/// Vulnerable: Upgrade accepts the all-zero root. Patched: it reverts.
enum class Model { Vulnerable, Patched };

inline constexpr std::size_t kMaxMessageBytes = 1024;
inline constexpr const char* kHashName = "sha256";

Word32 message_hash(const std::string& message);

struct StepResult {
    BridgeState state;
    Outcome outcome = Outcome::Reverted;
};

/// Pure transition.
StepResult step(const BridgeState& state, const Action& action, Model model = Model::Vulnerable);

/// Holds while no never-proved message has been processed.
bool oracle(const BridgeState& state);

struct Trace {
    std::vector<Action> actions;
    std::vector<Outcome> outcomes;
    std::optional<std::size_t> violation_step;  // 0-based, first step after which the oracle fails
};

/// Execute from a fresh state, checking the oracle after every step. Stops at
/// the first violation.
Trace replay(const std::vector<Action>& actions, Model model = Model::Vulnerable);
bool violates(const std::vector<Action>& actions, Model model = Model::Vulnerable);

/// Greedy step deletion followed by argument minimization, repeated until
/// neither changes the sequence. The input must violate the oracle.
std::vector<Action> shrink(std::vector<Action> actions, Model model = Model::Vulnerable);

/// Boundary values the generator draws from half of the time.
struct Dictionary {
    std::vector<Word32> roots;
    std::vector<std::uint64_t> integers;
    std::vector<std::string> messages;
    std::vector<Address> senders;
};
Dictionary dictionary(std::uint64_t seed);

struct CampaignOptions {
    std::uint64_t seed = 0;
    std::size_t runs = 256;
    std::size_t max_len = 10;
    Model model = Model::Vulnerable;
};

struct Verdict {
    bool passed = true;
    std::size_t runs_executed = 0;
    std::optional<std::size_t> failing_run;
    std::vector<Action> original;        // failing prefix before shrinking
    std::vector<Action> counterexample;  // shrunk
};

/// Runs are generated independently from (seed, run index) and executed in
/// index order; the first failing run is shrunk and reported.
Verdict fuzz_campaign(const CampaignOptions& options);

/// Random action sequence for one run (exposed for tests).
std::vector<Action> generate_sequence(std::uint64_t seed, std::size_t run, std::size_t max_len);

struct ExhaustiveResult {
    std::size_t sequences = 0;
    std::optional<std::vector<Action>> counterexample;
};

/// Every sequence of length 1..max_len over the dictionary argument pool.
ExhaustiveResult exhaustive_check(std::size_t max_len, Model model);

std::string describe(const Action& action);
nlohmann::ordered_json action_to_json(const Action& action);
nlohmann::ordered_json verdict_to_json(const Verdict& verdict, const CampaignOptions& options);

std::string_view to_string(Model model);
std::string_view to_string(Outcome outcome);

}  // namespace revinv::fuzz
