// fracsoc: sweep / protocol / synth harness over the fractional-physics SOC
// estimators. Runs self-verifying synthetic corpora by default; point
// --corpus at a directory of CSV cycles to use real data.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "fracsoc/experiments.hpp"

namespace fs = std::filesystem;
using namespace fracsoc;

namespace {

struct CommonOpts {
    std::string corpus_dir;  // empty = synthetic
    std::string out_dir = ".";
    double duration_s = 400.0;
    std::uint64_t corpus_seed = 42;

    // training knobs
    int epochs = 30;
    double learning_rate = 1e-3;
    int window_len = 20;
    double lambda = 0.25;
    int memory_len = 10;
    double alpha = 0.5;
    int batch_size = 64;
    std::uint64_t seed = 1;
    double init_scale = 0.01;
    int hidden = 16;
};

BatteryParams default_battery(double alpha) {
    return BatteryParams(3600.0, 0.999, 0.05, 0.02, 1500.0, FracOrder(alpha),
                         OcvCurve::default_curve());
}

Dataset load_corpus(const CommonOpts& opts, const std::vector<CycleKind>& kinds) {
    if (!opts.corpus_dir.empty()) {
        Dataset corpus;
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(opts.corpus_dir)) {
            if (e.path().extension() == ".csv") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            Dataset one = load_csv(f.string());
            for (auto& c : one.cycles) corpus.add(std::move(c));
        }
        return corpus;
    }
    return make_synth_corpus(default_battery(opts.alpha), kinds,
                             {-20.0, -10.0, 0.0, 10.0}, opts.duration_s, 1.0,
                             opts.memory_len, opts.corpus_seed);
}

TrainConfig make_train_config(const CommonOpts& o) {
    TrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.learning_rate = o.learning_rate;
    cfg.window_len = o.window_len;
    cfg.lambda = o.lambda;
    cfg.memory_len = o.memory_len;
    cfg.alpha = o.alpha;
    cfg.batch_size = o.batch_size;
    cfg.seed = o.seed;
    cfg.init_scale = o.init_scale;
    return cfg;
}

NetworkConfig make_net_config(const CommonOpts& o) {
    NetworkConfig net;
    net.hidden_dims = {o.hidden};
    net.window_len = o.window_len;
    return net;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--corpus", o.corpus_dir, "directory of cycle CSVs (default: synthetic)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--duration", o.duration_s, "synthetic cycle duration, seconds");
    cmd->add_option("--corpus-seed", o.corpus_seed, "synthetic corpus seed");
    cmd->add_option("--epochs", o.epochs, "training epochs");
    cmd->add_option("--lr", o.learning_rate, "Adam learning rate");
    cmd->add_option("--window", o.window_len, "input window length");
    cmd->add_option("--lambda", o.lambda, "physics loss weight");
    cmd->add_option("--memory", o.memory_len, "GL memory length M");
    cmd->add_option("--alpha", o.alpha, "fractional order");
    cmd->add_option("--batch", o.batch_size, "batch size (windows per step)");
    cmd->add_option("--seed", o.seed, "training seed");
    cmd->add_option("--init-scale", o.init_scale, "uniform init scale");
    cmd->add_option("--hidden", o.hidden, "hidden layer size");
}

std::vector<ModelSpec> parse_models(const std::string& archs, const std::string& variants) {
    std::vector<ModelSpec> models;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(tok);
        return out;
    };
    for (const auto& a : split(archs)) {
        for (const auto& v : split(variants)) {
            if (v != "plain" && v != "pinn")
                throw CLI::ValidationError("--variant", "must be plain and/or pinn");
            models.push_back({arch_from_string(a), v == "pinn"});
        }
    }
    return models;
}

// Per-epoch loss curve of the configured reference model (physics-regularized
// MLP on the experiment split), written next to the result tables.
void write_reference_report(const Dataset& corpus, int experiment_id, const CommonOpts& o,
                            const std::string& path) {
    const PartitionPlan plan = experiment_plan(experiment_id);
    const Partition part = partition(corpus, plan);
    const auto [train_ds, val_ds] = split_train_val(part.train, 0.2, o.window_len);
    const Normalizer norm = fit_normalizer(train_ds);
    const PhysicsConfig physics =
        make_physics(default_battery(o.alpha), o.memory_len, 1.0);
    const TrainResult result =
        train(make_train_config(o), make_net_config(o), train_ds, val_ds, physics, norm);
    write_report_csv(result.report, path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional-physics SOC estimation harness"};
    app.require_subcommand(1);
    // key=value file mirroring every flag, grouped in a [subcommand] section
    // (e.g. [protocol] epochs=40); explicit flags override file values
    app.set_config("--config", "", "configuration file; flags override its values");

    CommonOpts sweep_opts, proto_opts, synth_opts;

    auto* sweep = app.add_subcommand("sweep", "run an ablation sweep over one axis");
    std::string axis_name = "lambda";
    std::string values_s = "0,0.25,0.5,0.75,1,2";
    std::string archs = "mlp,rnn,lstm";
    std::string variants = "plain,pinn";
    std::string seeds_s = "1,2,3";
    sweep->add_option("--axis", axis_name,
                      "lambda|init_scale|noise|memory_len|frac_order|cycle_rotation");
    sweep->add_option("--values", values_s, "comma-separated grid");
    sweep->add_option("--arch", archs, "comma-separated subset of mlp,rnn,lstm");
    sweep->add_option("--variant", variants, "comma-separated subset of plain,pinn");
    sweep->add_option("--seeds", seeds_s, "comma-separated seeds");
    add_common(sweep, sweep_opts);

    auto* proto = app.add_subcommand("protocol", "run one leave-one-cycle-out experiment");
    int experiment_id = 5;
    proto->add_option("--experiment", experiment_id, "experiment id, 1..5")
        ->check(CLI::Range(1, 5));
    add_common(proto, proto_opts);

    auto* synth = app.add_subcommand("synth", "generate synthetic cycles as CSV");
    std::string profile_s = "random_walk";
    int n_cycles = 5;
    synth->add_option("--profile", profile_s, "constant|pulse|random_walk");
    synth->add_option("--cycles", n_cycles, "number of cycles");
    add_common(synth, synth_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            const CommonOpts& o = sweep_opts;
            fs::create_directories(o.out_dir);
            SweepSpec spec{sweep_axis_from_string(axis_name),
                           {},
                           make_train_config(o),
                           make_net_config(o),
                           default_battery(o.alpha),
                           parse_models(archs, variants),
                           {},
                           {},
                           experiment_plan(5)};
            std::stringstream vs(values_s), ss(seeds_s);
            std::string tok;
            while (std::getline(vs, tok, ',')) spec.values.push_back(std::stod(tok));
            while (std::getline(ss, tok, ',')) spec.seeds.push_back(std::stoull(tok));
            spec.corpus = load_corpus(
                o, {CycleKind::UDDS, CycleKind::HWFET, CycleKind::LA92, CycleKind::NN,
                    CycleKind::US06});
            const ResultTable table = run_sweep(spec);
            write_results_csv(table, o.out_dir + "/results.csv");
            write_results_md(table, o.out_dir + "/results.md");
            emit_plot(table, o.out_dir + "/plot_" + table.axis_name + ".svg");
            write_reference_report(spec.corpus, 5, o, o.out_dir + "/report.csv");
            std::cout << "sweep done: " << table.rows.size() << " rows -> " << o.out_dir
                      << std::endl;
        } else if (proto->parsed()) {
            const CommonOpts& o = proto_opts;
            fs::create_directories(o.out_dir);
            std::vector<CycleKind> kinds = {CycleKind::UDDS, CycleKind::HWFET, CycleKind::LA92,
                                            CycleKind::NN, CycleKind::US06};
            if (experiment_id == 1) kinds.push_back(CycleKind::CCCV);
            const Dataset corpus = load_corpus(o, kinds);
            const ResultTable table =
                run_paper_protocol(corpus, experiment_id, make_train_config(o),
                                   make_net_config(o), default_battery(o.alpha));
            write_results_csv(table, o.out_dir + "/results.csv");
            write_results_md(table, o.out_dir + "/results.md");
            emit_plot(table, o.out_dir + "/plot_temp_c.svg");
            write_reference_report(corpus, experiment_id, o, o.out_dir + "/report.csv");
            std::cout << "protocol " << experiment_id << " done -> " << o.out_dir << std::endl;
        } else if (synth->parsed()) {
            const CommonOpts& o = synth_opts;
            fs::create_directories(o.out_dir);
            const BatteryParams battery = default_battery(o.alpha);
            for (int i = 0; i < n_cycles; ++i) {
                SynthSpec spec;
                spec.profile = synth_profile_from_string(profile_s);
                spec.duration_s = o.duration_s;
                spec.soc0 = 0.5 + 0.08 * i;
                spec.seed = o.corpus_seed + static_cast<std::uint64_t>(i);
                spec.amplitude_a = battery.capacity_c_n / 3600.0;
                spec.memory_len = o.memory_len;
                spec.name = "synth_" + std::to_string(i);
                const Cycle cycle = synth_cycle(spec, battery);
                save_csv(cycle, o.out_dir + "/synth_" + std::to_string(i) + ".csv");
            }
            std::cout << "wrote " << n_cycles << " cycles -> " << o.out_dir << std::endl;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
