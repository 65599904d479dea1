// Command-line front end over the mbci C API.
//
// Exit codes: 0 success, 1 failed property (stream-sim mismatch), 2 usage,
// configuration or I/O error.

#include <mbci/mbci.h>

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
    void operator()(mbci_config* c) const { mbci_config_free(c); }
};
using ConfigPtr = std::unique_ptr<mbci_config, ConfigDeleter>;

struct CommonArgs {
    std::string config_path;
    std::optional<std::string> seed;
    std::optional<std::string> out;
    std::vector<std::string> overrides;
};

struct StreamArgs {
    std::size_t chunk_samples = 32;
    double pacing = 0.0;
    bool tamper = false;
};

int report_error(const char* what, mbci_status status)
{
    std::fprintf(stderr, "mbci: %s failed (%s): %s\n", what, mbci_status_name(status), mbci_last_error());
    return 2;
}

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config_path, "Configuration file (key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "Random seed");
    cmd->add_option("--out", args.out, "Session directory");
    cmd->add_option("--set", args.overrides, "Override a configuration key, key=value")->take_all();
}

// Builds the configuration from defaults, the config file, then flags.
int build_config(const CommonArgs& args, ConfigPtr& out)
{
    mbci_config* raw = nullptr;
    mbci_status st = args.config_path.empty() ? mbci_config_new(&raw) : mbci_config_load(args.config_path.c_str(), &raw);
    if (st != MBCI_OK)
        return report_error("loading configuration", st);
    out.reset(raw);
    auto set = [&](const std::string& key, const std::string& value) {
        const mbci_status s = mbci_config_set(out.get(), key.c_str(), value.c_str());
        return s == MBCI_OK ? 0 : report_error("setting configuration", s);
    };
    if (args.seed)
        if (int rc = set("seed", *args.seed))
            return rc;
    if (args.out)
        if (int rc = set("out", *args.out))
            return rc;
    for (const auto& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::fprintf(stderr, "mbci: --set expects key=value, got '%s'\n", kv.c_str());
            return 2;
        }
        if (int rc = set(kv.substr(0, eq), kv.substr(eq + 1)))
            return rc;
    }
    st = mbci_config_validate(out.get());
    if (st != MBCI_OK)
        return report_error("validating configuration", st);
    return 0;
}

int dump_defaults()
{
    mbci_config* raw = nullptr;
    mbci_status st = mbci_config_new(&raw);
    if (st != MBCI_OK)
        return report_error("creating configuration", st);
    ConfigPtr config(raw);
    char* text = nullptr;
    st = mbci_config_to_string(config.get(), &text);
    if (st != MBCI_OK)
        return report_error("formatting configuration", st);
    std::fputs(text, stdout);
    mbci_string_free(text);
    return 0;
}

int run_steps(const CommonArgs& args, unsigned steps, const char* what)
{
    ConfigPtr config;
    if (int rc = build_config(args, config))
        return rc;
    char* report = nullptr;
    const mbci_status st = mbci_run_study(config.get(), steps, &report);
    if (st != MBCI_OK)
        return report_error(what, st);
    std::puts(report);
    mbci_string_free(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Motor-execution BCI study pipeline on synthetic sessions"};
    app.require_subcommand(0, 1);
    bool dump = false;
    app.add_flag("--dump-defaults", dump, "Print the default configuration and exit");

    CommonArgs synth_args, study_args, smr_args, mrcp_args, stream_common;
    StreamArgs stream_args;

    auto* synth = app.add_subcommand("synth", "Generate calibration and driving sessions");
    add_common(synth, synth_args);
    auto* study = app.add_subcommand("run-study", "EMG, decoding, SMR and MRCP analyses");
    add_common(study, study_args);
    auto* smr = app.add_subcommand("analyze-smr", "Time-frequency maps at C3/C4");
    add_common(smr, smr_args);
    auto* mrcp = app.add_subcommand("analyze-mrcp", "Slow-potential averages at C3/C4");
    add_common(mrcp, mrcp_args);
    auto* stream = app.add_subcommand("stream-sim", "Online/offline EMG decoder equivalence");
    add_common(stream, stream_common);
    stream->add_option("--chunk-samples", stream_args.chunk_samples, "Samples per data frame")
        ->check(CLI::Range(1, 65535));
    stream->add_option("--pacing", stream_args.pacing, "Real-time factor, 0 streams as fast as possible")
        ->check(CLI::NonNegativeNumber);
    stream->add_flag("--tamper", stream_args.tamper, "Perturb the decoder state (negative control)");
    auto* defaults = app.add_subcommand("dump-defaults", "Print the default configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (dump || defaults->parsed())
        return dump_defaults();

    if (synth->parsed()) {
        ConfigPtr config;
        if (int rc = build_config(synth_args, config))
            return rc;
        const mbci_status st = mbci_synth(config.get());
        return st == MBCI_OK ? 0 : report_error("synth", st);
    }
    if (study->parsed())
        return run_steps(study_args, MBCI_STEP_ALL, "run-study");
    if (smr->parsed())
        return run_steps(smr_args, MBCI_STEP_SMR, "analyze-smr");
    if (mrcp->parsed())
        return run_steps(mrcp_args, MBCI_STEP_MRCP, "analyze-mrcp");
    if (stream->parsed()) {
        ConfigPtr config;
        if (int rc = build_config(stream_common, config))
            return rc;
        int equivalent = 0;
        std::size_t n = 0;
        const mbci_status st = mbci_stream_sim(config.get(), stream_args.chunk_samples, stream_args.pacing,
                                               stream_args.tamper ? 1 : 0, &equivalent, &n);
        if (st != MBCI_OK)
            return report_error("stream-sim", st);
        std::printf("%s stream-sim: %zu predictions, online %s offline\n", equivalent ? "PASS" : "FAIL", n,
                    equivalent ? "==" : "!=");
        return equivalent ? 0 : 1;
    }

    std::fputs(app.help().c_str(), stderr);
    return 2;
}
