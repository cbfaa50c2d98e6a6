#include "fracsoc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace fracsoc {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string fmt6(double v) { return fmt(v, "%.6g"); }

constexpr double kSampleStep = 1.0;  // corpus is nominally 1 Hz

}  // namespace

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::lambda: return "lambda";
        case SweepAxis::init_scale: return "init_scale";
        case SweepAxis::noise: return "noise";
        case SweepAxis::memory_len: return "memory_len";
        case SweepAxis::frac_order: return "frac_order";
        case SweepAxis::cycle_rotation: return "cycle_rotation";
    }
    throw std::logic_error("unknown SweepAxis");
}

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "lambda") return SweepAxis::lambda;
    if (s == "init_scale") return SweepAxis::init_scale;
    if (s == "noise") return SweepAxis::noise;
    if (s == "memory_len") return SweepAxis::memory_len;
    if (s == "frac_order") return SweepAxis::frac_order;
    if (s == "cycle_rotation") return SweepAxis::cycle_rotation;
    throw std::invalid_argument("unknown sweep axis: " + s);
}

std::vector<ModelSpec> all_models() {
    return {{Arch::MLP, false}, {Arch::RNN, false}, {Arch::LSTM, false},
            {Arch::MLP, true},  {Arch::RNN, true},  {Arch::LSTM, true}};
}

Dataset make_synth_corpus(const BatteryParams& battery, const std::vector<CycleKind>& kinds,
                          const std::vector<double>& temps, double duration_s, double t_s,
                          int memory_len, std::uint64_t seed,
                          SynthProfile default_profile) {
    Dataset corpus;
    const double amplitude = battery.capacity_c_n / 3600.0;  // ~1C envelope
    for (size_t ki = 0; ki < kinds.size(); ++ki) {
        for (size_t ti = 0; ti < temps.size(); ++ti) {
            SynthSpec spec;
            spec.profile = (kinds[ki] == CycleKind::CCCV) ? SynthProfile::constant
                                                          : default_profile;
            spec.duration_s = duration_s;
            spec.t_s = t_s;
            spec.seed = seed * 1000003ull + ki * 97ull + ti;
            Rng soc_rng(spec.seed ^ 0xabcdef1234567890ull);
            spec.soc0 = sample_initial_soc(soc_rng);
            spec.amplitude_a = (spec.profile == SynthProfile::constant) ? 0.25 * amplitude
                                                                        : amplitude;
            spec.temp_c = temps[ti];
            spec.memory_len = memory_len;
            spec.tag = kinds[ki];
            spec.name = to_string(kinds[ki]) + "_" + fmt6(temps[ti]) + "C";
            corpus.add(synth_cycle(spec, battery));
        }
    }
    return corpus;
}

std::pair<Dataset, Dataset> split_train_val(const Dataset& ds, double val_fraction,
                                            int min_records) {
    Dataset train, val;
    for (const auto& cycle : ds.cycles) {
        const int n = static_cast<int>(cycle.records.size());
        int n_val = static_cast<int>(std::floor(n * val_fraction));
        if (n_val < min_records || n - n_val < min_records) n_val = 0;
        Cycle head = cycle;
        head.records.assign(cycle.records.begin(), cycle.records.end() - n_val);
        train.add(std::move(head));
        if (n_val > 0) {
            Cycle tail = cycle;
            tail.name += "_val";
            tail.records.assign(cycle.records.end() - n_val, cycle.records.end());
            val.add(std::move(tail));
        }
    }
    return {std::move(train), std::move(val)};
}

namespace {

struct PreparedPoint {
    Dataset train;
    Dataset val;
    Dataset test;
    Normalizer norm;
    TrainConfig train_cfg;
    BatteryParams battery;
};

PreparedPoint prepare_point(const SweepSpec& spec, double value) {
    TrainConfig cfg = spec.base_train;
    BatteryParams battery = spec.battery;
    PartitionPlan plan = spec.plan;
    Dataset corpus = spec.corpus;

    switch (spec.axis) {
        case SweepAxis::lambda:
            cfg.lambda = value;
            break;
        case SweepAxis::init_scale:
            cfg.init_scale = value;
            break;
        case SweepAxis::noise: {
            NoiseSpec ns;
            ns.kind = NoiseKind::gaussian;
            ns.level = value;
            ns.seed = spec.base_train.seed * 7919ull + 13ull;
            corpus = add_noise(corpus, ns);
            break;
        }
        case SweepAxis::memory_len:
            cfg.memory_len = static_cast<int>(std::llround(value));
            break;
        case SweepAxis::frac_order:
            cfg.alpha = value;
            battery = BatteryParams(battery.capacity_c_n, battery.eta, battery.r0,
                                    battery.rp, battery.cp, FracOrder(value), battery.ocv);
            break;
        case SweepAxis::cycle_rotation:
            plan = experiment_plan(static_cast<int>(std::llround(value)));
            break;
    }

    Partition part = partition(corpus, plan);
    PreparedPoint point{Dataset{}, Dataset{}, std::move(part.test), Normalizer{},
                        cfg, std::move(battery)};
    auto [train, val] =
        split_train_val(part.train, spec.val_fraction, spec.base_net.window_len);
    point.train = std::move(train);
    point.val = std::move(val);
    point.norm = fit_normalizer(point.train);
    return point;
}

ResultRow run_one(const PreparedPoint& point, const NetworkConfig& base_net,
                  const ModelSpec& model, std::uint64_t seed, const std::string& axis_value) {
    ResultRow row;
    row.axis_value = axis_value;
    row.arch = to_string(model.arch);
    row.variant = model.pinn ? "fdiff_pinn" : "plain";
    row.seed = std::to_string(seed);
    try {
        TrainConfig cfg = point.train_cfg;
        cfg.seed = seed;
        cfg.plain = !model.pinn;
        NetworkConfig net = base_net;
        net.arch = model.arch;
        const PhysicsConfig physics =
            make_physics(point.battery, cfg.memory_len, kSampleStep);
        const TrainResult tr = train(cfg, net, point.train, point.val, physics, point.norm);
        const EvalResult ev = evaluate(tr.params, net, point.test, physics,
                                       LossWeights{cfg.lambda}, point.norm);
        row.metrics = ev.metrics;
        row.loss = ev.loss;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

void append_aggregates(ResultTable& table, const std::vector<ResultRow>& seed_rows) {
    std::vector<const ResultRow*> ok;
    for (const auto& r : seed_rows) {
        if (r.ok) ok.push_back(&r);
    }
    for (const char* kind : {"mean", "max"}) {
        ResultRow agg;
        agg.axis_value = seed_rows.front().axis_value;
        agg.arch = seed_rows.front().arch;
        agg.variant = seed_rows.front().variant;
        agg.seed = kind;
        agg.aggregate = true;
        if (ok.empty()) {
            agg.ok = false;
            agg.error = "all seeds failed";
        } else if (std::string(kind) == "mean") {
            for (const auto* r : ok) {
                agg.metrics.mae += r->metrics.mae;
                agg.metrics.mse += r->metrics.mse;
                agg.metrics.rmse += r->metrics.rmse;
                agg.metrics.n += r->metrics.n;
                agg.loss.l_data += r->loss.l_data;
                agg.loss.l_dyn += r->loss.l_dyn;
                agg.loss.l_pol += r->loss.l_pol;
                agg.loss.l_phy += r->loss.l_phy;
                agg.loss.l_total += r->loss.l_total;
            }
            const double n = static_cast<double>(ok.size());
            agg.metrics.mae /= n;
            agg.metrics.mse /= n;
            agg.metrics.rmse /= n;
            agg.loss.l_data /= n;
            agg.loss.l_dyn /= n;
            agg.loss.l_pol /= n;
            agg.loss.l_phy /= n;
            agg.loss.l_total /= n;
        } else {
            for (const auto* r : ok) {
                agg.metrics.mae = std::max(agg.metrics.mae, r->metrics.mae);
                agg.metrics.mse = std::max(agg.metrics.mse, r->metrics.mse);
                agg.metrics.rmse = std::max(agg.metrics.rmse, r->metrics.rmse);
                agg.loss.l_data = std::max(agg.loss.l_data, r->loss.l_data);
                agg.loss.l_dyn = std::max(agg.loss.l_dyn, r->loss.l_dyn);
                agg.loss.l_pol = std::max(agg.loss.l_pol, r->loss.l_pol);
                agg.loss.l_phy = std::max(agg.loss.l_phy, r->loss.l_phy);
                agg.loss.l_total = std::max(agg.loss.l_total, r->loss.l_total);
            }
        }
        table.rows.push_back(std::move(agg));
    }
}

}  // namespace

ResultTable run_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("run_sweep: empty value grid");
    if (spec.seeds.empty()) throw std::invalid_argument("run_sweep: empty seed list");
    if (spec.models.empty()) throw std::invalid_argument("run_sweep: no models selected");

    ResultTable table;
    table.axis_name = to_string(spec.axis);
    for (double value : spec.values) {
        const std::string axis_value = fmt6(value);
        const PreparedPoint point = prepare_point(spec, value);
        for (const ModelSpec& model : spec.models) {
            std::vector<ResultRow> seed_rows;
            for (std::uint64_t seed : spec.seeds) {
                seed_rows.push_back(run_one(point, spec.base_net, model, seed, axis_value));
            }
            for (const auto& r : seed_rows) table.rows.push_back(r);
            append_aggregates(table, seed_rows);
        }
    }
    return table;
}

ResultTable run_paper_protocol(const Dataset& corpus, int experiment_id,
                               const TrainConfig& base_train, const NetworkConfig& base_net,
                               const BatteryParams& battery, double val_fraction) {
    const PartitionPlan plan = experiment_plan(experiment_id);
    const Partition part = partition(corpus, plan);
    auto [train_ds, val_ds] = split_train_val(part.train, val_fraction, base_net.window_len);
    const Normalizer norm = fit_normalizer(train_ds);
    const PhysicsConfig physics = make_physics(battery, base_train.memory_len, kSampleStep);

    ResultTable table;
    table.axis_name = "temp_c";
    for (const ModelSpec& model : all_models()) {
        TrainConfig cfg = base_train;
        cfg.plain = !model.pinn;
        NetworkConfig net = base_net;
        net.arch = model.arch;
        bool trained = false;
        TrainResult tr;
        std::string train_error;
        try {
            tr = train(cfg, net, train_ds, val_ds, physics, norm);
            trained = true;
        } catch (const std::exception& e) {
            train_error = e.what();
        }
        for (double temp : plan.temperatures) {
            ResultRow row;
            row.axis_value = fmt6(temp);
            row.arch = to_string(model.arch);
            row.variant = model.pinn ? "fdiff_pinn" : "plain";
            row.seed = std::to_string(cfg.seed);
            if (!trained) {
                row.ok = false;
                row.error = train_error;
                table.rows.push_back(std::move(row));
                continue;
            }
            try {
                Dataset one;
                for (CycleKind kind : plan.test_kinds) {
                    const Cycle* c = part.test.find(kind, temp);
                    if (c) one.add(*c);
                }
                const EvalResult ev =
                    evaluate(tr.params, net, one, physics, LossWeights{cfg.lambda}, norm);
                row.metrics = ev.metrics;
                row.loss = ev.loss;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Emitters
// ---------------------------------------------------------------------------

void write_results_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << table.axis_name
        << ",arch,variant,seed,status,error,mae,mse,rmse,n,l_data,l_dyn,l_pol,l_phy,l_total\n";
    for (const auto& r : table.rows) {
        out << r.axis_value << ',' << r.arch << ',' << r.variant << ',' << r.seed << ','
            << (r.ok ? "ok" : "failed") << ',' << r.error << ',' << fmt(r.metrics.mae) << ','
            << fmt(r.metrics.mse) << ',' << fmt(r.metrics.rmse) << ',' << r.metrics.n << ','
            << fmt(r.loss.l_data) << ',' << fmt(r.loss.l_dyn) << ',' << fmt(r.loss.l_pol)
            << ',' << fmt(r.loss.l_phy) << ',' << fmt(r.loss.l_total) << "\n";
    }
}

void write_results_md(const ResultTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "| " << table.axis_name
        << " | arch | variant | seed | status | MAE | MSE | RMSE | l_phy | l_total |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : table.rows) {
        out << "| " << r.axis_value << " | " << r.arch << " | " << r.variant << " | " << r.seed
            << " | " << (r.ok ? "ok" : "failed") << " | " << fmt6(r.metrics.mae) << " | "
            << fmt6(r.metrics.mse) << " | " << fmt6(r.metrics.rmse) << " | "
            << fmt6(r.loss.l_phy) << " | " << fmt6(r.loss.l_total) << " |\n";
    }
}

void emit_plot(const ResultTable& table, const std::string& path) {
    if (table.rows.empty()) throw std::invalid_argument("emit_plot: empty table");

    // mean-aggregate MAE per (arch, variant) series; seed rows when no
    // aggregates exist (protocol tables)
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    bool have_aggregates = false;
    for (const auto& r : table.rows) {
        if (r.aggregate && r.seed == "mean") have_aggregates = true;
    }
    for (const auto& r : table.rows) {
        if (!r.ok) continue;
        if (have_aggregates && !(r.aggregate && r.seed == "mean")) continue;
        if (!have_aggregates && r.aggregate) continue;
        series[r.variant + "_" + r.arch].emplace_back(std::stod(r.axis_value), r.metrics.mae);
    }
    if (series.empty()) throw std::invalid_argument("emit_plot: no plottable rows");

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& [name, pts] : series) {
        std::sort(pts.begin(), pts.end());
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;

    const double w = 640, h = 420, ml = 70, mr = 160, mt = 30, mb = 50;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                    "#d62728", "#9467bd", "#8c564b"};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
        << h - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        out << "<text x=\"" << fmt6(px(fx)) << "\" y=\"" << h - mb + 18
            << "\" text-anchor=\"middle\">" << fmt6(fx) << "</text>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << fmt6(py(fy) + 4)
            << "\" text-anchor=\"end\">" << fmt6(fy) << "</text>\n";
    }
    out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\">" << table.axis_name << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (mt + h - mb) / 2
        << ")\">MAE</text>\n";

    int idx = 0;
    for (const auto& [name, pts] : series) {
        const char* color = palette[idx % 6];
        if (pts.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : pts) out << fmt6(px(x)) << ',' << fmt6(py(y)) << ' ';
            out << "\"/>\n";
        }
        for (const auto& [x, y] : pts) {
            out << "<circle cx=\"" << fmt6(px(x)) << "\" cy=\"" << fmt6(py(y))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        out << "<text x=\"" << w - mr + 12 << "\" y=\"" << mt + 16 * idx + 10 << "\" fill=\""
            << color << "\">" << name << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
}

}  // namespace fracsoc
