// qmssb measure|epr|chsh|cosmo-spectrum|astro-constants [--config PATH] [--seed N]
//       [--n N] [--workers N] [--out DIR] [--strict]
//
// Exit status: 0 success, 2 configuration error, 3 numerical divergence,
// 4 quality warning under --strict, 1 anything else.

#include <CLI11.hpp>
#include <iostream>

#include "qmssb/config.hpp"
#include "qmssb/error.hpp"
#include "qmssb/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kDivergence = 3;
constexpr int kQualityWarning = 4;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::optional<unsigned> workers;
    std::optional<std::string> out;
    bool strict = false;
};

int run(const std::string &kind, const Options &opt) {
    nlohmann::json doc = nlohmann::json::object();
    if (!opt.config.empty()) {
        std::ifstream in(opt.config);
        if (!in) {
            throw qmssb::ConfigError("cannot open config file '" + opt.config + "'");
        }
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error &e) {
            throw qmssb::ConfigError(opt.config + ": " + e.what());
        }
        if (!doc.is_object()) {
            throw qmssb::ConfigError(opt.config + ": top level must be an object");
        }
    }
    if (doc.contains("kind") && doc["kind"] != kind) {
        throw qmssb::ConfigError("config kind '" + doc["kind"].dump() + "' does not match subcommand '" + kind + "'");
    }
    doc["kind"] = kind;
    if (opt.seed) doc["master_seed"] = *opt.seed;
    if (opt.n) doc["n"] = *opt.n;
    if (opt.out) doc["output_dir"] = *opt.out;

    const qmssb::ExperimentConfig config = qmssb::parse_config(doc);
    const unsigned workers = opt.workers ? *opt.workers : config.workers;
    const qmssb::ResultBundle bundle = qmssb::run_experiment(config, workers);
    for (const auto &path : qmssb::emit_results(bundle, config.output_dir)) {
        std::cout << path.string() << '\n';
    }
    for (const std::string &w : bundle.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    if (opt.strict && !bundle.warnings.empty()) {
        return kQualityWarning;
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Measurement as spontaneous symmetry breaking: ensembles, EPR/CHSH statistics, reheating spectra"};
    app.require_subcommand(1);
    Options opt;
    std::string chosen;
    for (const char *kind : {"measure", "epr", "chsh", "cosmo-spectrum", "astro-constants"}) {
        CLI::App *sub = app.add_subcommand(kind);
        sub->add_option("--config", opt.config, "JSON experiment configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--n", opt.n, "ensemble size");
        sub->add_option("--workers", opt.workers, "worker threads (default QMSSB_WORKERS or all cores)");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_flag("--strict", opt.strict, "exit 4 when a quality warning is raised");
        sub->callback([&chosen, kind] { chosen = kind; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        return run(chosen, opt);
    } catch (const qmssb::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const qmssb::DomainError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const qmssb::DivergenceError &e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return kDivergence;
    } catch (const qmssb::StepSizeError &e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return kDivergence;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
