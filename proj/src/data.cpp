#include "fracsoc/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fracsoc {

std::string to_string(CycleKind kind) {
    switch (kind) {
        case CycleKind::UDDS: return "UDDS";
        case CycleKind::HWFET: return "HWFET";
        case CycleKind::LA92: return "LA92";
        case CycleKind::NN: return "NN";
        case CycleKind::US06: return "US06";
        case CycleKind::CCCV: return "CC-CV";
        case CycleKind::SYNTH: return "SYNTH";
    }
    throw std::logic_error("unknown CycleKind");
}

CycleKind cycle_kind_from_string(const std::string& s) {
    if (s == "UDDS") return CycleKind::UDDS;
    if (s == "HWFET") return CycleKind::HWFET;
    if (s == "LA92") return CycleKind::LA92;
    if (s == "NN") return CycleKind::NN;
    if (s == "US06") return CycleKind::US06;
    if (s == "CC-CV" || s == "CCCV") return CycleKind::CCCV;
    if (s == "SYNTH") return CycleKind::SYNTH;
    throw std::invalid_argument("unknown cycle kind: " + s);
}

SynthProfile synth_profile_from_string(const std::string& s) {
    if (s == "constant") return SynthProfile::constant;
    if (s == "pulse") return SynthProfile::pulse;
    if (s == "random_walk") return SynthProfile::random_walk;
    throw std::invalid_argument("unknown synth profile: " + s);
}

void Dataset::add(Cycle cycle) {
    for (const auto& c : cycles) {
        if (c.kind == cycle.kind && c.temp_c == cycle.temp_c) {
            throw std::invalid_argument("Dataset: duplicate cycle " + to_string(cycle.kind) +
                                        " at " + std::to_string(cycle.temp_c) + " C");
        }
    }
    cycles.push_back(std::move(cycle));
}

const Cycle* Dataset::find(CycleKind kind, double temp_c) const {
    for (const auto& c : cycles) {
        if (c.kind == kind && c.temp_c == temp_c) return &c;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& field, int line_no) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("csv parse error at line " + std::to_string(line_no) +
                                 ": bad number '" + field + "'");
    }
    if (pos != field.size())
        throw std::runtime_error("csv parse error at line " + std::to_string(line_no) +
                                 ": trailing junk in '" + field + "'");
    if (!std::isfinite(v))
        throw std::runtime_error("csv parse error at line " + std::to_string(line_no) +
                                 ": non-finite value");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    ++line_no;
    Cycle cycle;
    cycle.name = path;
    {
        std::string kind_s;
        double temp = 0.0;
        std::stringstream ss(line);
        std::string tok;
        bool have_kind = false, have_temp = false;
        while (ss >> tok) {
            if (tok == "#") continue;
            if (tok.rfind("kind=", 0) == 0) {
                kind_s = tok.substr(5);
                have_kind = true;
            } else if (tok.rfind("temp_c=", 0) == 0) {
                temp = parse_double(tok.substr(7), line_no);
                have_temp = true;
            }
        }
        if (line.empty() || line[0] != '#' || !have_kind || !have_temp)
            throw std::runtime_error(path + ": line 1 must be '# kind=<KIND> temp_c=<T>'");
        cycle.kind = cycle_kind_from_string(kind_s);
        cycle.temp_c = temp;
    }

    if (!std::getline(in, line)) throw std::runtime_error(path + ": missing column header");
    ++line_no;
    bool has_truth;
    if (line == "t_s,current_a,voltage_v,temp_c") {
        has_truth = false;
    } else if (line == "t_s,current_a,voltage_v,temp_c,soc_true,up_true") {
        has_truth = true;
    } else {
        throw std::runtime_error(path + ": unexpected column header at line 2");
    }

    double prev_t = 0.0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        const size_t expected = has_truth ? 6u : 4u;
        if (fields.size() != expected)
            throw std::runtime_error(path + ": wrong field count at line " +
                                     std::to_string(line_no));
        CycleRecord rec;
        rec.t = parse_double(fields[0], line_no);
        rec.current = parse_double(fields[1], line_no);
        rec.voltage = parse_double(fields[2], line_no);
        rec.temperature = parse_double(fields[3], line_no);
        if (has_truth) {
            rec.soc_true = parse_double(fields[4], line_no);
            rec.up_true = parse_double(fields[5], line_no);
        }
        if (!first && !(rec.t > prev_t))
            throw std::runtime_error(path + ": non-increasing timestamp at line " +
                                     std::to_string(line_no));
        prev_t = rec.t;
        first = false;
        cycle.records.push_back(rec);
    }

    Dataset ds;
    ds.add(std::move(cycle));
    return ds;
}

void save_csv(const Cycle& cycle, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const bool has_truth = !cycle.records.empty() && cycle.records.front().soc_true.has_value();
    out << "# kind=" << to_string(cycle.kind) << " temp_c=" << fmt17(cycle.temp_c) << "\n";
    out << "t_s,current_a,voltage_v,temp_c" << (has_truth ? ",soc_true,up_true" : "") << "\n";
    for (const auto& r : cycle.records) {
        out << fmt17(r.t) << ',' << fmt17(r.current) << ',' << fmt17(r.voltage) << ','
            << fmt17(r.temperature);
        if (has_truth) {
            out << ',' << fmt17(r.soc_true.value()) << ',' << fmt17(r.up_true.value_or(0.0));
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// Synthetic cycles
// ---------------------------------------------------------------------------

Cycle synth_cycle(const SynthSpec& spec, const BatteryParams& params) {
    if (!(spec.duration_s > 0.0)) throw std::invalid_argument("synth_cycle: duration must be > 0");
    const int n = static_cast<int>(std::llround(spec.duration_s / spec.t_s));
    if (n < 1) throw std::invalid_argument("synth_cycle: duration shorter than one sample");

    Rng rng(spec.seed);
    CurrentProfile profile;
    profile.reserve(static_cast<size_t>(n));
    double walk = 0.0;
    const int pulse_half = std::max(1, static_cast<int>(std::llround(30.0 / spec.t_s)));
    for (int k = 0; k < n; ++k) {
        double current = 0.0;
        switch (spec.profile) {
            case SynthProfile::constant:
                current = spec.amplitude_a;
                break;
            case SynthProfile::pulse:
                current = ((k / pulse_half) % 2 == 0) ? spec.amplitude_a : 0.0;
                break;
            case SynthProfile::random_walk:
                walk += 0.1 * spec.amplitude_a * rng.gaussian();
                walk = std::clamp(walk, -spec.amplitude_a, spec.amplitude_a);
                current = walk;
                break;
        }
        profile.emplace_back(current, spec.t_s);
    }

    const auto trace = simulate_cycle(params, profile, spec.t_s, spec.soc0, spec.memory_len);
    Cycle cycle;
    cycle.name = spec.name;
    cycle.kind = spec.tag;
    cycle.temp_c = spec.temp_c;
    cycle.records.reserve(trace.size());
    for (const auto& s : trace) {
        CycleRecord rec;
        rec.t = s.t;
        rec.current = s.current;
        rec.voltage = s.voltage;
        rec.temperature = spec.temp_c;
        rec.soc_true = s.soc;
        rec.up_true = s.u_p;
        cycle.records.push_back(rec);
    }
    return cycle;
}

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

namespace {

double channel_value(const CycleRecord& r, Channel c) {
    switch (c) {
        case Channel::voltage: return r.voltage;
        case Channel::current: return r.current;
        case Channel::temperature: return r.temperature;
    }
    throw std::logic_error("unknown channel");
}

double& channel_ref(CycleRecord& r, Channel c) {
    switch (c) {
        case Channel::voltage: return r.voltage;
        case Channel::current: return r.current;
        case Channel::temperature: return r.temperature;
    }
    throw std::logic_error("unknown channel");
}

std::array<double, kNumChannels> channel_ranges(const Dataset& ds) {
    std::array<double, kNumChannels> lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& cycle : ds.cycles) {
        for (const auto& r : cycle.records) {
            for (int c = 0; c < kNumChannels; ++c) {
                const double v = channel_value(r, static_cast<Channel>(c));
                lo[c] = std::min(lo[c], v);
                hi[c] = std::max(hi[c], v);
            }
        }
    }
    std::array<double, kNumChannels> range;
    for (int c = 0; c < kNumChannels; ++c) {
        range[c] = (hi[c] > lo[c]) ? hi[c] - lo[c] : 1.0;
    }
    return range;
}

}  // namespace

Dataset add_noise(const Dataset& dataset, const NoiseSpec& spec) {
    if (spec.channels.empty()) throw std::invalid_argument("add_noise: channels empty");
    if (spec.level < 0.0) throw std::invalid_argument("add_noise: level must be >= 0");
    Dataset out = dataset;
    if (spec.level == 0.0) return out;

    const auto range = channel_ranges(dataset);
    Rng rng(spec.seed);
    for (auto& cycle : out.cycles) {
        for (auto& rec : cycle.records) {
            for (Channel c : spec.channels) {
                const double unit = (spec.kind == NoiseKind::gaussian)
                                        ? rng.gaussian()
                                        : rng.uniform(-1.0, 1.0);
                channel_ref(rec, c) += spec.level * range[static_cast<int>(c)] * unit;
            }
        }
    }
    return out;  // soc_true/up_true untouched
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

double Normalizer::apply(Channel c, double raw) const {
    const int i = static_cast<int>(c);
    const double range = hi[i] - lo[i];
    if (range <= 0.0) return 0.0;  // degenerate channel maps to constant 0
    return (raw - lo[i]) / range;
}

double Normalizer::invert(Channel c, double normalized) const {
    const int i = static_cast<int>(c);
    const double range = hi[i] - lo[i];
    if (range <= 0.0) return lo[i];
    return lo[i] + normalized * range;
}

Normalizer fit_normalizer(const Dataset& training_split) {
    bool any = false;
    Normalizer n;
    n.lo.fill(std::numeric_limits<double>::infinity());
    n.hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& cycle : training_split.cycles) {
        for (const auto& r : cycle.records) {
            any = true;
            for (int c = 0; c < kNumChannels; ++c) {
                const double v = channel_value(r, static_cast<Channel>(c));
                n.lo[c] = std::min(n.lo[c], v);
                n.hi[c] = std::max(n.hi[c], v);
            }
        }
    }
    if (!any) throw std::invalid_argument("fit_normalizer: empty training split");
    return n;
}

Dataset apply_normalizer(const Normalizer& norm, const Dataset& dataset) {
    Dataset out = dataset;
    for (auto& cycle : out.cycles) {
        for (auto& r : cycle.records) {
            for (int c = 0; c < kNumChannels; ++c) {
                auto ch = static_cast<Channel>(c);
                channel_ref(r, ch) = norm.apply(ch, channel_value(r, ch));
            }
        }
    }
    return out;
}

Eigen::MatrixXd feature_matrix(const Cycle& cycle, const Normalizer& norm) {
    Eigen::MatrixXd f(static_cast<Eigen::Index>(cycle.records.size()), kNumChannels);
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        const auto& r = cycle.records[static_cast<size_t>(i)];
        f(i, 0) = norm.apply(Channel::voltage, r.voltage);
        f(i, 1) = norm.apply(Channel::current, r.current);
        f(i, 2) = norm.apply(Channel::temperature, r.temperature);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Initial SOC and partitioning
// ---------------------------------------------------------------------------

double sample_initial_soc(Rng& rng, double lo, double hi) { return rng.uniform(lo, hi); }

PartitionPlan experiment_plan(int experiment_id) {
    using K = CycleKind;
    PartitionPlan plan;
    switch (experiment_id) {
        case 1:
            plan.train_kinds = {K::CCCV};
            plan.test_kinds = {K::HWFET};
            break;
        case 2:
            plan.train_kinds = {K::NN, K::HWFET, K::UDDS, K::US06};
            plan.test_kinds = {K::LA92};
            break;
        case 3:
            plan.train_kinds = {K::HWFET, K::LA92, K::UDDS, K::US06};
            plan.test_kinds = {K::NN};
            break;
        case 4:
            plan.train_kinds = {K::HWFET, K::LA92, K::NN, K::US06};
            plan.test_kinds = {K::UDDS};
            break;
        case 5:
            plan.train_kinds = {K::HWFET, K::LA92, K::UDDS, K::NN};
            plan.test_kinds = {K::US06};
            break;
        default:
            throw std::invalid_argument("experiment_plan: id must be 1..5");
    }
    return plan;
}

Partition partition(const Dataset& dataset, const PartitionPlan& plan) {
    for (CycleKind k : plan.train_kinds) {
        for (CycleKind t : plan.test_kinds) {
            if (k == t) throw std::invalid_argument("partition: overlapping train/test kinds");
        }
    }
    Partition p;
    auto collect = [&](const std::vector<CycleKind>& kinds, Dataset& out) {
        for (CycleKind kind : kinds) {
            for (double temp : plan.temperatures) {
                const Cycle* c = dataset.find(kind, temp);
                if (!c)
                    throw std::invalid_argument("partition: missing cycle " + to_string(kind) +
                                                " at " + std::to_string(temp) + " C");
                out.add(*c);
            }
        }
    };
    collect(plan.train_kinds, p.train);
    collect(plan.test_kinds, p.test);
    return p;
}

}  // namespace fracsoc
