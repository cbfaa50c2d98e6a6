#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "fracsoc/data.hpp"

using namespace fracsoc;

namespace {

BatteryParams test_params() {
    return BatteryParams(3600.0, 0.999, 0.05, 0.02, 1500.0, FracOrder(0.5),
                         OcvCurve::default_curve());
}

Cycle tiny_cycle(CycleKind kind, double temp, int n, double base_current) {
    Cycle c;
    c.name = to_string(kind);
    c.kind = kind;
    c.temp_c = temp;
    for (int k = 0; k < n; ++k) {
        CycleRecord r;
        r.t = k + 1.0;
        r.current = base_current + 0.1 * k;
        r.voltage = 3.5 + 0.01 * k;
        r.temperature = temp;
        r.soc_true = 0.9 - 0.001 * k;
        r.up_true = 0.002 * k;
        c.records.push_back(r);
    }
    return c;
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/fracsoc_test_") + name;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("cycle kind names round trip") {
    for (CycleKind k : {CycleKind::UDDS, CycleKind::HWFET, CycleKind::LA92, CycleKind::NN,
                        CycleKind::US06, CycleKind::CCCV, CycleKind::SYNTH}) {
        CHECK(cycle_kind_from_string(to_string(k)) == k);
    }
    CHECK(to_string(CycleKind::CCCV) == "CC-CV");
    CHECK(cycle_kind_from_string("CCCV") == CycleKind::CCCV);
    CHECK_THROWS_AS(cycle_kind_from_string("FTP75"), std::invalid_argument);
}

TEST_CASE("dataset rejects duplicate (kind, temperature) pairs") {
    Dataset ds;
    ds.add(tiny_cycle(CycleKind::UDDS, -10.0, 3, 1.0));
    ds.add(tiny_cycle(CycleKind::UDDS, 0.0, 3, 1.0));   // same kind, new temp: fine
    ds.add(tiny_cycle(CycleKind::LA92, -10.0, 3, 1.0)); // same temp, new kind: fine
    CHECK_THROWS_AS(ds.add(tiny_cycle(CycleKind::UDDS, -10.0, 5, 2.0)),
                    std::invalid_argument);
    CHECK(ds.find(CycleKind::UDDS, 0.0) != nullptr);
    CHECK(ds.find(CycleKind::US06, 0.0) == nullptr);
}

TEST_CASE("csv: save/load round trip is value-identical") {
    Cycle original = tiny_cycle(CycleKind::HWFET, -20.0, 7, 0.123456789012345);
    original.records[2].current = 1.0 / 3.0;  // needs all 17 digits
    const std::string path = temp_path("roundtrip.csv");
    save_csv(original, path);
    const Dataset loaded = load_csv(path);
    REQUIRE(loaded.cycles.size() == 1);
    const Cycle& got = loaded.cycles[0];
    CHECK(got.kind == CycleKind::HWFET);
    CHECK(got.temp_c == -20.0);
    REQUIRE(got.records.size() == original.records.size());
    for (size_t i = 0; i < got.records.size(); ++i) {
        CHECK(got.records[i].t == original.records[i].t);
        CHECK(got.records[i].current == original.records[i].current);
        CHECK(got.records[i].voltage == original.records[i].voltage);
        CHECK(got.records[i].temperature == original.records[i].temperature);
        CHECK(got.records[i].soc_true == original.records[i].soc_true);
        CHECK(got.records[i].up_true == original.records[i].up_true);
    }
    std::remove(path.c_str());
}

TEST_CASE("csv: cycles without ground truth load with empty optionals") {
    const std::string path = temp_path("notruth.csv");
    write_file(path,
               "# kind=UDDS temp_c=10\n"
               "t_s,current_a,voltage_v,temp_c\n"
               "1,0.5,3.7,10\n"
               "2,0.6,3.69,10\n");
    const Dataset ds = load_csv(path);
    REQUIRE(ds.cycles[0].records.size() == 2);
    CHECK_FALSE(ds.cycles[0].records[0].soc_true.has_value());
    CHECK_FALSE(ds.cycles[0].records[0].up_true.has_value());
    std::remove(path.c_str());
}

TEST_CASE("csv: malformed input reports the offending line") {
    const std::string path = temp_path("bad.csv");

    write_file(path, "t_s,current_a,voltage_v,temp_c\n1,0.5,3.7,10\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("line 1"), std::runtime_error);

    write_file(path,
               "# kind=UDDS temp_c=10\n"
               "t_s,current_a,voltage_v,temp_c\n"
               "1,0.5,3.7,10\n"
               "2,oops,3.69,10\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("line 4"), std::runtime_error);

    write_file(path,
               "# kind=UDDS temp_c=10\n"
               "t_s,current_a,voltage_v,temp_c\n"
               "5,0.5,3.7,10\n"
               "5,0.6,3.69,10\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("line 4"), std::runtime_error);

    write_file(path,
               "# kind=UDDS temp_c=10\n"
               "t_s,current_a,voltage_v,temp_c\n"
               "1,0.5,3.7\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("line 3"), std::runtime_error);

    CHECK_THROWS_AS(load_csv(temp_path("does_not_exist.csv")), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("synth: deterministic for a fixed seed, distinct across seeds") {
    SynthSpec spec;
    spec.profile = SynthProfile::random_walk;
    spec.duration_s = 120.0;
    spec.seed = 42;
    const Cycle a = synth_cycle(spec, test_params());
    const Cycle b = synth_cycle(spec, test_params());
    REQUIRE(a.records.size() == b.records.size());
    REQUIRE(a.records.size() == 120);
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].current == b.records[i].current);
        CHECK(a.records[i].voltage == b.records[i].voltage);
        CHECK(a.records[i].soc_true == b.records[i].soc_true);
    }
    spec.seed = 43;
    const Cycle c = synth_cycle(spec, test_params());
    bool differs = false;
    for (size_t i = 0; i < a.records.size(); ++i) {
        if (a.records[i].current != c.records[i].current) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("synth: profile shapes") {
    SynthSpec spec;
    spec.duration_s = 90.0;
    spec.amplitude_a = 2.0;
    spec.profile = SynthProfile::constant;
    const Cycle constant = synth_cycle(spec, test_params());
    for (const auto& r : constant.records) CHECK(r.current == 2.0);

    spec.profile = SynthProfile::pulse;
    const Cycle pulse = synth_cycle(spec, test_params());
    // 30 s on, 30 s off
    CHECK(pulse.records[0].current == 2.0);
    CHECK(pulse.records[29].current == 2.0);
    CHECK(pulse.records[30].current == 0.0);
    CHECK(pulse.records[59].current == 0.0);
    CHECK(pulse.records[60].current == 2.0);

    spec.profile = SynthProfile::random_walk;
    const Cycle walk = synth_cycle(spec, test_params());
    for (const auto& r : walk.records) CHECK(std::abs(r.current) <= 2.0);
}

TEST_CASE("synth: ground truth is attached and plausible") {
    SynthSpec spec;
    spec.profile = SynthProfile::constant;
    spec.duration_s = 60.0;
    spec.soc0 = 0.8;
    const Cycle c = synth_cycle(spec, test_params());
    for (const auto& r : c.records) {
        REQUIRE(r.soc_true.has_value());
        REQUIRE(r.up_true.has_value());
        CHECK(*r.soc_true <= 0.8);  // constant discharge
        CHECK(*r.soc_true >= 0.0);
    }
    CHECK(*c.records.back().soc_true < *c.records.front().soc_true);
}

TEST_CASE("noise: labels untouched, level zero is the identity") {
    Dataset ds;
    ds.add(tiny_cycle(CycleKind::UDDS, 0.0, 50, 1.0));

    NoiseSpec off;
    off.level = 0.0;
    const Dataset same = add_noise(ds, off);
    for (size_t i = 0; i < 50; ++i) {
        CHECK(same.cycles[0].records[i].voltage == ds.cycles[0].records[i].voltage);
    }

    NoiseSpec on;
    on.level = 0.1;
    on.seed = 7;
    const Dataset noisy = add_noise(ds, on);
    bool changed = false;
    for (size_t i = 0; i < 50; ++i) {
        const auto& a = ds.cycles[0].records[i];
        const auto& b = noisy.cycles[0].records[i];
        CHECK(b.soc_true == a.soc_true);
        CHECK(b.up_true == a.up_true);
        CHECK(b.t == a.t);
        if (b.voltage != a.voltage) changed = true;
    }
    CHECK(changed);

    // same seed reproduces the same noise
    const Dataset again = add_noise(ds, on);
    for (size_t i = 0; i < 50; ++i) {
        CHECK(again.cycles[0].records[i].voltage == noisy.cycles[0].records[i].voltage);
    }
}

TEST_CASE("noise: intensity scales with the channel range") {
    // Channel spans determine the additive scale: a channel with twice the
    // range gets twice the perturbation for the same level.
    Dataset narrow, wide;
    {
        Cycle c = tiny_cycle(CycleKind::UDDS, 0.0, 400, 1.0);
        for (size_t i = 0; i < c.records.size(); ++i)
            c.records[i].voltage = 3.0 + 0.001 * static_cast<double>(i % 100);
        narrow.add(c);
        for (size_t i = 0; i < c.records.size(); ++i)
            c.records[i].voltage = 3.0 + 0.002 * static_cast<double>(i % 100);
        wide.add(c);
    }
    NoiseSpec spec;
    spec.level = 0.05;
    spec.seed = 11;
    spec.channels = {Channel::voltage};
    const Dataset n1 = add_noise(narrow, spec);
    const Dataset n2 = add_noise(wide, spec);
    for (size_t i = 0; i < 400; ++i) {
        const double d1 = n1.cycles[0].records[i].voltage - narrow.cycles[0].records[i].voltage;
        const double d2 = n2.cycles[0].records[i].voltage - wide.cycles[0].records[i].voltage;
        CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-12));
    }

    NoiseSpec bad;
    bad.level = -0.1;
    CHECK_THROWS_AS(add_noise(narrow, bad), std::invalid_argument);
    bad.level = 0.1;
    bad.channels = {};
    CHECK_THROWS_AS(add_noise(narrow, bad), std::invalid_argument);
}

TEST_CASE("noise: gaussian sample standard deviation near the requested level") {
    Dataset ds;
    Cycle c = tiny_cycle(CycleKind::UDDS, 0.0, 4000, 0.0);
    for (size_t i = 0; i < c.records.size(); ++i)
        c.records[i].voltage = (i % 2 == 0) ? 0.0 : 1.0;  // range exactly 1
    ds.add(c);
    NoiseSpec spec;
    spec.level = 0.1;
    spec.seed = 3;
    spec.channels = {Channel::voltage};
    const Dataset noisy = add_noise(ds, spec);
    double sum = 0.0, sum2 = 0.0;
    for (size_t i = 0; i < 4000; ++i) {
        const double d = noisy.cycles[0].records[i].voltage - ds.cycles[0].records[i].voltage;
        sum += d;
        sum2 += d * d;
    }
    const double mean = sum / 4000.0;
    const double stddev = std::sqrt(sum2 / 4000.0 - mean * mean);
    CHECK(std::abs(mean) < 0.01);
    CHECK(stddev == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("normalizer: maps the training extremes to [0, 1] and inverts") {
    Dataset train;
    {
        Cycle c = tiny_cycle(CycleKind::UDDS, -10.0, 20, 1.0);
        for (size_t i = 0; i < c.records.size(); ++i)
            c.records[i].temperature = -10.0 + 0.5 * static_cast<double>(i);
        train.add(c);
    }
    const Normalizer norm = fit_normalizer(train);
    for (int c = 0; c < kNumChannels; ++c) {
        const auto ch = static_cast<Channel>(c);
        CHECK(norm.apply(ch, norm.lo[c]) == doctest::Approx(0.0));
        CHECK(norm.apply(ch, norm.hi[c]) == doctest::Approx(1.0));
        CHECK(norm.invert(ch, norm.apply(ch, 0.37 * norm.lo[c] + 0.63 * norm.hi[c])) ==
              doctest::Approx(0.37 * norm.lo[c] + 0.63 * norm.hi[c]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(fit_normalizer(Dataset{}), std::invalid_argument);

    // a degenerate (constant) channel maps to 0 and inverts to the constant
    Dataset flat;
    flat.add(tiny_cycle(CycleKind::US06, 25.0, 5, 1.0));  // temperature constant
    const Normalizer fn = fit_normalizer(flat);
    CHECK(fn.apply(Channel::temperature, 25.0) == 0.0);
    CHECK(fn.invert(Channel::temperature, 0.7) == 25.0);
}

TEST_CASE("normalizer: statistics come from the training split only") {
    Dataset train, test;
    train.add(tiny_cycle(CycleKind::UDDS, 0.0, 10, 1.0));
    Cycle hot = tiny_cycle(CycleKind::US06, 0.0, 10, 1.0);
    for (auto& r : hot.records) r.voltage += 10.0;  // far outside the training span
    test.add(hot);

    const Normalizer norm = fit_normalizer(train);
    const Dataset test_n = apply_normalizer(norm, test);
    // test values exceed 1: proof the test split did not influence the fit
    for (const auto& r : test_n.cycles[0].records) CHECK(r.voltage > 1.0);

    const Dataset train_n = apply_normalizer(norm, train);
    for (const auto& r : train_n.cycles[0].records) {
        CHECK(r.voltage >= 0.0);
        CHECK(r.voltage <= 1.0);
    }
    // labels are not normalized
    CHECK(train_n.cycles[0].records[3].soc_true == train.cycles[0].records[3].soc_true);
}

TEST_CASE("feature_matrix: layout and channel order") {
    Dataset train;
    train.add(tiny_cycle(CycleKind::UDDS, 0.0, 5, 1.0));
    const Normalizer norm = fit_normalizer(train);
    const Eigen::MatrixXd f = feature_matrix(train.cycles[0], norm);
    REQUIRE(f.rows() == 5);
    REQUIRE(f.cols() == 3);
    for (int i = 0; i < 5; ++i) {
        const auto& r = train.cycles[0].records[static_cast<size_t>(i)];
        CHECK(f(i, 0) == doctest::Approx(norm.apply(Channel::voltage, r.voltage)));
        CHECK(f(i, 1) == doctest::Approx(norm.apply(Channel::current, r.current)));
        CHECK(f(i, 2) == doctest::Approx(norm.apply(Channel::temperature, r.temperature)));
    }
}

TEST_CASE("sample_initial_soc: stays inside the requested interval") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double s = sample_initial_soc(rng);
        CHECK(s >= 0.2);
        CHECK(s < 1.0);
    }
    Rng rng2(5);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double s = sample_initial_soc(rng2, 0.4, 0.6);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    CHECK(lo >= 0.4);
    CHECK(hi < 0.6);
    CHECK(hi - lo > 0.15);  // actually spreads over the interval
}

TEST_CASE("experiment plans: five rotations, disjoint train/test") {
    for (int id = 1; id <= 5; ++id) {
        const PartitionPlan plan = experiment_plan(id);
        CHECK(plan.test_kinds.size() == 1);
        CHECK_FALSE(plan.train_kinds.empty());
        for (CycleKind k : plan.train_kinds) {
            CHECK(k != plan.test_kinds[0]);
        }
        CHECK(plan.temperatures == std::vector<double>{-20.0, -10.0, 0.0, 10.0});
    }
    CHECK(experiment_plan(1).train_kinds == std::vector<CycleKind>{CycleKind::CCCV});
    CHECK(experiment_plan(1).test_kinds == std::vector<CycleKind>{CycleKind::HWFET});
    CHECK(experiment_plan(2).test_kinds == std::vector<CycleKind>{CycleKind::LA92});
    CHECK(experiment_plan(3).test_kinds == std::vector<CycleKind>{CycleKind::NN});
    CHECK(experiment_plan(4).test_kinds == std::vector<CycleKind>{CycleKind::UDDS});
    CHECK(experiment_plan(5).test_kinds == std::vector<CycleKind>{CycleKind::US06});
    CHECK_THROWS_AS(experiment_plan(0), std::invalid_argument);
    CHECK_THROWS_AS(experiment_plan(6), std::invalid_argument);
}

TEST_CASE("partition: selects the planned cycles and reports missing ones") {
    Dataset ds;
    const std::vector<CycleKind> kinds = {CycleKind::UDDS, CycleKind::HWFET, CycleKind::LA92,
                                          CycleKind::NN, CycleKind::US06, CycleKind::CCCV};
    for (CycleKind k : kinds) {
        for (double t : {-20.0, -10.0, 0.0, 10.0}) {
            ds.add(tiny_cycle(k, t, 4, 1.0));
        }
    }
    const Partition p = partition(ds, experiment_plan(4));
    CHECK(p.train.cycles.size() == 16);  // 4 kinds x 4 temps
    CHECK(p.test.cycles.size() == 4);
    for (const auto& c : p.test.cycles) CHECK(c.kind == CycleKind::UDDS);
    for (const auto& c : p.train.cycles) CHECK(c.kind != CycleKind::UDDS);

    Dataset incomplete;
    incomplete.add(tiny_cycle(CycleKind::UDDS, -20.0, 4, 1.0));
    CHECK_THROWS_AS(partition(incomplete, experiment_plan(4)), std::invalid_argument);

    PartitionPlan overlapping = experiment_plan(4);
    overlapping.train_kinds.push_back(CycleKind::UDDS);
    CHECK_THROWS_AS(partition(ds, overlapping), std::invalid_argument);
}
