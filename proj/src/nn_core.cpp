#include "fracsoc/nn_core.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fracsoc/rng.hpp"

namespace fracsoc {

std::string to_string(Arch arch) {
    switch (arch) {
        case Arch::MLP: return "mlp";
        case Arch::RNN: return "rnn";
        case Arch::LSTM: return "lstm";
    }
    throw std::logic_error("unknown Arch");
}

Arch arch_from_string(const std::string& s) {
    if (s == "mlp" || s == "MLP") return Arch::MLP;
    if (s == "rnn" || s == "RNN") return Arch::RNN;
    if (s == "lstm" || s == "LSTM") return Arch::LSTM;
    throw std::invalid_argument("unknown architecture: " + s);
}

namespace {

void validate(const NetworkConfig& c) {
    if (c.input_dim < 1 || c.output_dim < 1 || c.window_len < 1)
        throw std::invalid_argument("NetworkConfig: dims and window_len must be >= 1");
    if (c.hidden_dims.empty()) throw std::invalid_argument("NetworkConfig: no hidden dims");
    for (int h : c.hidden_dims) {
        if (h < 1) throw std::invalid_argument("NetworkConfig: hidden dims must be >= 1");
    }
}

}  // namespace

std::vector<ParamBlock> param_layout(const NetworkConfig& config) {
    validate(config);
    std::vector<ParamBlock> blocks;
    int off = 0;
    auto add = [&](const std::string& name, int rows, int cols, bool is_bias) {
        blocks.push_back({name, rows, cols, off, is_bias});
        off += rows * cols;
    };
    const int h = config.hidden_dims.front();
    const int d = config.input_dim;
    const int o = config.output_dim;
    switch (config.arch) {
        case Arch::MLP: {
            std::vector<int> dims;
            dims.push_back(config.window_len * d);
            dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
            dims.push_back(o);
            for (size_t l = 0; l + 1 < dims.size(); ++l) {
                add("W" + std::to_string(l), dims[l + 1], dims[l], false);
                add("b" + std::to_string(l), dims[l + 1], 1, true);
            }
            break;
        }
        case Arch::RNN:
            add("Wxh", h, d, false);
            add("Whh", h, h, false);
            add("bh", h, 1, true);
            add("Who", o, h, false);
            add("bo", o, 1, true);
            break;
        case Arch::LSTM:
            for (const char* g : {"f", "i", "o", "c"}) {
                add(std::string("W") + g, h, d, false);
                add(std::string("U") + g, h, h, false);
                add(std::string("b") + g, h, 1, true);
            }
            add("Who", o, h, false);
            add("bo", o, 1, true);
            break;
    }
    return blocks;
}

int param_count(const NetworkConfig& config) {
    const auto layout = param_layout(config);
    return layout.back().offset + layout.back().rows * layout.back().cols;
}

NetworkParams init_params(const NetworkConfig& config, std::uint64_t seed, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("init_params: scale must be > 0");
    const auto layout = param_layout(config);
    NetworkParams p;
    p.values = Eigen::VectorXd::Zero(param_count(config));
    Rng rng(seed);
    for (const auto& b : layout) {
        if (b.is_bias) continue;
        for (int k = 0; k < b.rows * b.cols; ++k) {
            p.values[b.offset + k] = rng.uniform(-scale, scale);
        }
    }
    return p;
}

namespace {

using MatMap = Eigen::Map<const Eigen::MatrixXd>;
using VecMap = Eigen::Map<const Eigen::VectorXd>;
using MutMatMap = Eigen::Map<Eigen::MatrixXd>;
using MutVecMap = Eigen::Map<Eigen::VectorXd>;

// Block accessors over the flat vector; indices follow param_layout order.
struct Views {
    const std::vector<ParamBlock> layout;
    const Eigen::VectorXd& v;

    Views(const NetworkConfig& cfg, const Eigen::VectorXd& values)
        : layout(param_layout(cfg)), v(values) {
        const auto& last = layout.back();
        if (v.size() != last.offset + last.rows * last.cols)
            throw std::invalid_argument("NetworkParams: size does not match config layout");
    }
    MatMap mat(int i) const {
        const auto& b = layout[static_cast<size_t>(i)];
        return MatMap(v.data() + b.offset, b.rows, b.cols);
    }
    VecMap vec(int i) const {
        const auto& b = layout[static_cast<size_t>(i)];
        return VecMap(v.data() + b.offset, b.rows);
    }
};

struct GradViews {
    const std::vector<ParamBlock> layout;
    Eigen::VectorXd& g;

    GradViews(const NetworkConfig& cfg, Eigen::VectorXd& grads)
        : layout(param_layout(cfg)), g(grads) {}
    MutMatMap mat(int i) {
        const auto& b = layout[static_cast<size_t>(i)];
        return MutMatMap(g.data() + b.offset, b.rows, b.cols);
    }
    MutVecMap vec(int i) {
        const auto& b = layout[static_cast<size_t>(i)];
        return MutVecMap(g.data() + b.offset, b.rows);
    }
};

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
    return 1.0 / (1.0 + (-x.array()).exp());
}

Eigen::VectorXd flatten_window(const Eigen::MatrixXd& w) {
    // time-major: [row 0, row 1, ...]
    Eigen::VectorXd x(w.size());
    Eigen::Index k = 0;
    for (Eigen::Index t = 0; t < w.rows(); ++t) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) x[k++] = w(t, j);
    }
    return x;
}

}  // namespace

ForwardResult forward(const NetworkParams& params, const NetworkConfig& config,
                      const Eigen::MatrixXd& input_window) {
    if (input_window.rows() != config.window_len || input_window.cols() != config.input_dim)
        throw std::invalid_argument("forward: input window shape mismatch");
    if (config.output_dim != 2)
        throw std::invalid_argument("forward: expected two output heads (SOC, U_p)");
    const Views p(config, params.values);

    ForwardResult out;
    out.cache.arch = config.arch;
    out.cache.window = input_window;

    switch (config.arch) {
        case Arch::MLP: {
            auto& act = out.cache.act;
            act.push_back(flatten_window(input_window));
            const int n_layers = static_cast<int>(p.layout.size()) / 2;
            for (int l = 0; l < n_layers; ++l) {
                Eigen::VectorXd z = p.mat(2 * l) * act.back() + p.vec(2 * l + 1);
                if (l + 1 < n_layers) z = z.array().tanh();
                act.push_back(std::move(z));
            }
            out.soc = act.back()[0];
            out.up = act.back()[1];
            break;
        }
        case Arch::RNN: {
            const int hdim = config.hidden_dims.front();
            auto& h = out.cache.h;
            h.push_back(Eigen::VectorXd::Zero(hdim));
            for (int t = 0; t < config.window_len; ++t) {
                const Eigen::VectorXd x = input_window.row(t).transpose();
                Eigen::VectorXd z = p.mat(0) * x + p.mat(1) * h.back() + p.vec(2);
                h.push_back(z.array().tanh().matrix());
            }
            const Eigen::VectorXd y = p.mat(3) * h.back() + p.vec(4);
            out.soc = y[0];
            out.up = y[1];
            break;
        }
        case Arch::LSTM: {
            const int hdim = config.hidden_dims.front();
            auto& cache = out.cache;
            cache.h.push_back(Eigen::VectorXd::Zero(hdim));
            cache.c.push_back(Eigen::VectorXd::Zero(hdim));
            for (int t = 0; t < config.window_len; ++t) {
                const Eigen::VectorXd x = input_window.row(t).transpose();
                const Eigen::VectorXd& hp = cache.h.back();
                const Eigen::VectorXd f = sigmoid(p.mat(0) * x + p.mat(1) * hp + p.vec(2));
                const Eigen::VectorXd i = sigmoid(p.mat(3) * x + p.mat(4) * hp + p.vec(5));
                const Eigen::VectorXd og = sigmoid(p.mat(6) * x + p.mat(7) * hp + p.vec(8));
                const Eigen::VectorXd g =
                    (p.mat(9) * x + p.mat(10) * hp + p.vec(11)).array().tanh();
                const Eigen::VectorXd c_new =
                    f.cwiseProduct(cache.c.back()) + i.cwiseProduct(g);
                const Eigen::VectorXd h_new =
                    og.cwiseProduct(c_new.array().tanh().matrix());
                cache.gate_f.push_back(f);
                cache.gate_i.push_back(i);
                cache.gate_o.push_back(og);
                cache.gate_g.push_back(g);
                cache.c.push_back(c_new);
                cache.h.push_back(h_new);
            }
            const Eigen::VectorXd y = p.mat(12) * cache.h.back() + p.vec(13);
            out.soc = y[0];
            out.up = y[1];
            break;
        }
    }
    return out;
}

Eigen::VectorXd backward(const NetworkParams& params, const NetworkConfig& config,
                         const ForwardCache& cache, double d_soc, double d_up) {
    if (cache.arch != config.arch)
        throw std::invalid_argument("backward: cache does not match config");
    const Views p(config, params.values);
    Eigen::VectorXd grads = Eigen::VectorXd::Zero(params.values.size());
    GradViews g(config, grads);

    Eigen::Vector2d dy(d_soc, d_up);

    switch (config.arch) {
        case Arch::MLP: {
            const int n_layers = static_cast<int>(p.layout.size()) / 2;
            if (cache.act.size() != static_cast<size_t>(n_layers) + 1)
                throw std::invalid_argument("backward: stale MLP cache");
            Eigen::VectorXd delta = dy;
            for (int l = n_layers - 1; l >= 0; --l) {
                g.mat(2 * l) += delta * cache.act[static_cast<size_t>(l)].transpose();
                g.vec(2 * l + 1) += delta;
                if (l > 0) {
                    const Eigen::VectorXd& a = cache.act[static_cast<size_t>(l)];
                    delta = (p.mat(2 * l).transpose() * delta).cwiseProduct(
                        (1.0 - a.array().square()).matrix());
                }
            }
            break;
        }
        case Arch::RNN: {
            const int T = config.window_len;
            if (cache.h.size() != static_cast<size_t>(T) + 1)
                throw std::invalid_argument("backward: stale RNN cache");
            g.mat(3) += dy * cache.h.back().transpose();
            g.vec(4) += dy;
            Eigen::VectorXd dh = p.mat(3).transpose() * dy;
            for (int t = T - 1; t >= 0; --t) {
                const Eigen::VectorXd& h_new = cache.h[static_cast<size_t>(t) + 1];
                const Eigen::VectorXd dz =
                    dh.cwiseProduct((1.0 - h_new.array().square()).matrix());
                g.mat(0) += dz * cache.window.row(t);
                g.mat(1) += dz * cache.h[static_cast<size_t>(t)].transpose();
                g.vec(2) += dz;
                dh = p.mat(1).transpose() * dz;
            }
            break;
        }
        case Arch::LSTM: {
            const int T = config.window_len;
            if (cache.h.size() != static_cast<size_t>(T) + 1 ||
                cache.gate_f.size() != static_cast<size_t>(T))
                throw std::invalid_argument("backward: stale LSTM cache");
            g.mat(12) += dy * cache.h.back().transpose();
            g.vec(13) += dy;
            Eigen::VectorXd dh = p.mat(12).transpose() * dy;
            Eigen::VectorXd dc = Eigen::VectorXd::Zero(config.hidden_dims.front());
            for (int t = T - 1; t >= 0; --t) {
                const auto& f = cache.gate_f[static_cast<size_t>(t)];
                const auto& i = cache.gate_i[static_cast<size_t>(t)];
                const auto& og = cache.gate_o[static_cast<size_t>(t)];
                const auto& gg = cache.gate_g[static_cast<size_t>(t)];
                const auto& c_new = cache.c[static_cast<size_t>(t) + 1];
                const auto& c_old = cache.c[static_cast<size_t>(t)];
                const auto& h_old = cache.h[static_cast<size_t>(t)];
                const Eigen::ArrayXd tanh_c = c_new.array().tanh();

                const Eigen::VectorXd dzo =
                    (dh.array() * tanh_c * og.array() * (1.0 - og.array())).matrix();
                dc.array() += dh.array() * og.array() * (1.0 - tanh_c.square());
                const Eigen::VectorXd dzf =
                    (dc.array() * c_old.array() * f.array() * (1.0 - f.array())).matrix();
                const Eigen::VectorXd dzi =
                    (dc.array() * gg.array() * i.array() * (1.0 - i.array())).matrix();
                const Eigen::VectorXd dzg =
                    (dc.array() * i.array() * (1.0 - gg.array().square())).matrix();

                g.mat(0) += dzf * cache.window.row(t);
                g.mat(1) += dzf * h_old.transpose();
                g.vec(2) += dzf;
                g.mat(3) += dzi * cache.window.row(t);
                g.mat(4) += dzi * h_old.transpose();
                g.vec(5) += dzi;
                g.mat(6) += dzo * cache.window.row(t);
                g.mat(7) += dzo * h_old.transpose();
                g.vec(8) += dzo;
                g.mat(9) += dzg * cache.window.row(t);
                g.mat(10) += dzg * h_old.transpose();
                g.vec(11) += dzg;

                dh = p.mat(1).transpose() * dzf + p.mat(4).transpose() * dzi +
                     p.mat(7).transpose() * dzo + p.mat(10).transpose() * dzg;
                dc = dc.cwiseProduct(f);
            }
            break;
        }
    }
    return grads;
}

AdamState make_adam(int n_params, AdamConfig cfg) {
    AdamState s;
    s.cfg = cfg;
    s.m = Eigen::VectorXd::Zero(n_params);
    s.v = Eigen::VectorXd::Zero(n_params);
    return s;
}

void adam_step(NetworkParams& params, const Eigen::VectorXd& grads, AdamState& state) {
    if (grads.size() != params.values.size() || state.m.size() != params.values.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    ++state.step;
    const auto& c = state.cfg;
    state.m = c.beta1 * state.m + (1.0 - c.beta1) * grads;
    state.v = c.beta2 * state.v + (1.0 - c.beta2) * grads.cwiseProduct(grads);
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    params.values.array() -= c.lr * (state.m.array() / bc1) /
                             ((state.v.array() / bc2).sqrt() + c.eps);
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'F', 'S', 'O', 'C', 'N', 'E', 'T', '1'};

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const NetworkConfig& config,
                     const NetworkParams& params, const std::vector<double>& aux) {
    if (params.values.size() != param_count(config))
        throw std::invalid_argument("save_checkpoint: params do not match config");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(kMagic, sizeof(kMagic));
    write_pod<std::int32_t>(out, static_cast<std::int32_t>(config.arch));
    write_pod<std::int32_t>(out, config.input_dim);
    write_pod<std::int32_t>(out, static_cast<std::int32_t>(config.hidden_dims.size()));
    for (int h : config.hidden_dims) write_pod<std::int32_t>(out, h);
    write_pod<std::int32_t>(out, config.output_dim);
    write_pod<std::int32_t>(out, config.window_len);
    write_pod<std::int64_t>(out, static_cast<std::int64_t>(params.values.size()));
    out.write(reinterpret_cast<const char*>(params.values.data()),
              static_cast<std::streamsize>(sizeof(double) * params.values.size()));
    write_pod<std::int64_t>(out, static_cast<std::int64_t>(aux.size()));
    out.write(reinterpret_cast<const char*>(aux.data()),
              static_cast<std::streamsize>(sizeof(double) * aux.size()));
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    Checkpoint ck;
    ck.config.arch = static_cast<Arch>(read_pod<std::int32_t>(in));
    ck.config.input_dim = read_pod<std::int32_t>(in);
    const int n_hidden = read_pod<std::int32_t>(in);
    ck.config.hidden_dims.resize(static_cast<size_t>(n_hidden));
    for (int& h : ck.config.hidden_dims) h = read_pod<std::int32_t>(in);
    ck.config.output_dim = read_pod<std::int32_t>(in);
    ck.config.window_len = read_pod<std::int32_t>(in);
    const auto n = read_pod<std::int64_t>(in);
    if (n != param_count(ck.config))
        throw std::runtime_error("checkpoint: parameter count mismatch in " + path);
    ck.params.values.resize(n);
    in.read(reinterpret_cast<char*>(ck.params.values.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(n)));
    const auto n_aux = read_pod<std::int64_t>(in);
    ck.aux.resize(static_cast<size_t>(n_aux));
    if (n_aux > 0) {
        in.read(reinterpret_cast<char*>(ck.aux.data()),
                static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(n_aux)));
    }
    if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
    return ck;
}

}  // namespace fracsoc
