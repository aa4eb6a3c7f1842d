#ifndef PROMO_CLI_HPP
#define PROMO_CLI_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace promo {

enum ExitCode : int { kOk = 0, kUsage = 1, kConfigError = 2, kVerifyFailed = 3, kTooLarge = 4 };

struct CommandOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<long> replications;
    int threads = 1;
    std::string family = "standard";
    long keep_traces = 100;          // simulate: traces written to CSV
    std::string cache_dir;           // empty: PROMO_CACHE_DIR, then ~/.cache/promo
};

int cmd_index(const CommandOptions& o, std::ostream& log);
int cmd_simulate(const CommandOptions& o, std::ostream& log);
int cmd_verify(const CommandOptions& o, std::ostream& log);
int cmd_experiment(const std::string& name, const CommandOptions& o, std::ostream& log);

/// Entry point of the promo executable.
int run_cli(int argc, char** argv);

} // namespace promo

#endif // PROMO_CLI_HPP
