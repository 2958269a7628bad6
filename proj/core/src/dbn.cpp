#include "eoda/dbn.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "eoda/io.hpp"

namespace eoda {

namespace {

inline float sigmoidf(float x) { return 1.0f / (1.0f + std::exp(-x)); }

Eigen::MatrixXf sigmoid(Eigen::MatrixXf m) {
  return m.unaryExpr([](float x) { return sigmoidf(x); });
}

// Bernoulli draw per entry. Column-major iteration order is part of the pinned
// determinism contract.
Eigen::MatrixXf bernoulli(const Eigen::MatrixXf& p, Rng& rng) {
  Eigen::MatrixXf out(p.rows(), p.cols());
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      out(i, j) = rng.bernoulli(p(i, j)) ? 1.0f : 0.0f;
    }
  }
  return out;
}

Eigen::MatrixXf to_matrix(const std::vector<BitVec>& rows, const std::vector<std::size_t>& idx,
                          std::size_t lo, std::size_t hi) {
  const Eigen::Index dim = static_cast<Eigen::Index>(rows[idx[lo]].size());
  Eigen::MatrixXf m(dim, static_cast<Eigen::Index>(hi - lo));
  for (std::size_t k = lo; k < hi; ++k) {
    const BitVec& r = rows[idx[k]];
    for (Eigen::Index i = 0; i < dim; ++i) m(i, static_cast<Eigen::Index>(k - lo)) = r[i];
  }
  return m;
}

// Numerically stable log(1 + exp(x)).
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

Rbm Rbm::init(int visible, int hidden, float weight_scale, Rng& rng) {
  if (visible < 1 || hidden < 1) throw std::invalid_argument("rbm: dimensions must be >= 1");
  Rbm r;
  r.W.resize(hidden, visible);
  for (Eigen::Index j = 0; j < r.W.cols(); ++j) {
    for (Eigen::Index i = 0; i < r.W.rows(); ++i) {
      r.W(i, j) = weight_scale * static_cast<float>(rng.normal());
    }
  }
  r.b = Eigen::VectorXf::Zero(visible);
  r.c = Eigen::VectorXf::Zero(hidden);
  return r;
}

double rbm_free_energy(const Rbm& r, const BitVec& v) {
  if (static_cast<int>(v.size()) != r.visible())
    throw std::invalid_argument("free energy: visible size mismatch");
  double f = 0.0;
  for (int i = 0; i < r.visible(); ++i) {
    if (v[i]) f -= r.b(i);
  }
  for (int h = 0; h < r.hidden(); ++h) {
    double a = r.c(h);
    for (int i = 0; i < r.visible(); ++i) {
      if (v[i]) a += r.W(h, i);
    }
    f -= softplus(a);
  }
  return f;
}

void rbm_cd_batch(Rbm& r, const Eigen::MatrixXf& batch, int cd_steps, float learning_rate,
                  Rng& rng) {
  const auto bsz = static_cast<float>(batch.cols());
  Eigen::MatrixXf h0p = sigmoid((r.W * batch).colwise() + r.c);
  Eigen::MatrixXf hs = bernoulli(h0p, rng);
  Eigen::MatrixXf vs, hp;
  for (int step = 0; step < cd_steps; ++step) {
    Eigen::MatrixXf vp = sigmoid((r.W.transpose() * hs).colwise() + r.b);
    vs = bernoulli(vp, rng);
    hp = sigmoid((r.W * vs).colwise() + r.c);
    if (step + 1 < cd_steps) hs = bernoulli(hp, rng);
  }
  const float lr = learning_rate / bsz;
  r.W += lr * (h0p * batch.transpose() - hp * vs.transpose());
  r.b += lr * (batch.rowwise().sum() - vs.rowwise().sum());
  r.c += lr * (h0p.rowwise().sum() - hp.rowwise().sum());
}

Rbm rbm_train_cd(Rbm r, const std::vector<BitVec>& data, const TrainConfig& cfg, Rng& rng) {
  if (data.empty()) throw std::invalid_argument("rbm train: empty dataset");
  for (const auto& row : data) {
    if (static_cast<int>(row.size()) != r.visible())
      throw std::invalid_argument("rbm train: row width does not match visible layer");
  }
  if (cfg.cd_steps < 1 || cfg.batch_size < 1 || cfg.epochs < 0)
    throw std::invalid_argument("rbm train: bad config");

  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(idx);
    for (std::size_t lo = 0, bi = 0; lo < idx.size(); lo += cfg.batch_size, ++bi) {
      std::size_t hi = std::min(idx.size(), lo + cfg.batch_size);
      rbm_cd_batch(r, to_matrix(data, idx, lo, hi), cfg.cd_steps, cfg.learning_rate, rng);
      if (!r.W.allFinite() || !r.b.allFinite() || !r.c.allFinite()) {
        throw std::runtime_error("rbm train: non-finite parameters at epoch " +
                                 std::to_string(epoch) + ", batch " + std::to_string(bi));
      }
    }
  }
  return r;
}

double rbm_reconstruction_error(const Rbm& r, const std::vector<BitVec>& data) {
  if (data.empty()) throw std::invalid_argument("reconstruction error: empty dataset");
  double total = 0.0;
  for (const auto& row : data) {
    Eigen::VectorXf v(r.visible());
    for (int i = 0; i < r.visible(); ++i) v(i) = row[i];
    Eigen::VectorXf hp = sigmoid(r.W * v + r.c);
    Eigen::VectorXf vp = sigmoid(r.W.transpose() * hp + r.b);
    for (int i = 0; i < r.visible(); ++i) total += std::abs(static_cast<double>(vp(i)) - row[i]);
  }
  return total / (data.size() * static_cast<std::size_t>(r.visible()));
}

DbnModel DbnModel::create(const std::vector<int>& layer_sizes, int ilp_feature_count,
                          float weight_init_scale, Rng& rng) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("dbn: need at least two layer sizes");
  if (ilp_feature_count < 0) throw std::invalid_argument("dbn: negative feature count");
  DbnModel m;
  m.ilp_feature_count = ilp_feature_count;
  const std::size_t L = layer_sizes.size() - 1;  // number of RBMs
  for (std::size_t l = 0; l + 1 < L; ++l) {
    m.layers.push_back(Rbm::init(layer_sizes[l], layer_sizes[l + 1], weight_init_scale, rng));
  }
  const int top_vis = layer_sizes[L - 1] + ilp_feature_count + 1;
  m.layers.push_back(Rbm::init(top_vis, layer_sizes[L], weight_init_scale, rng));
  return m;
}

std::vector<int> DbnModel::layer_sizes() const {
  std::vector<int> s;
  s.push_back(layers.front().visible());
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) s.push_back(layers[l].hidden());
  s.push_back(layers.back().hidden());
  return s;
}

namespace {

void check_rows(const DbnModel& m, const std::vector<DbnTrainRow>& rows) {
  const int vis = m.layers.size() > 1 ? m.bottom_visible() : m.code_size();
  for (const auto& row : rows) {
    if (static_cast<int>(row.visible.size()) != vis)
      throw std::invalid_argument("dbn train: visible width mismatch");
    if (static_cast<int>(row.ilp.size()) != m.ilp_feature_count)
      throw std::invalid_argument("dbn train: feature width does not match ilp_feature_count");
    if (row.label > 1) throw std::invalid_argument("dbn train: label must be 0 or 1");
  }
}

BitVec sample_hidden_bits(const Rbm& r, const BitVec& v, Rng& rng) {
  Eigen::VectorXf x(r.visible());
  for (int i = 0; i < r.visible(); ++i) x(i) = v[i];
  Eigen::VectorXf hp = sigmoid(r.W * x + r.c);
  BitVec h(static_cast<std::size_t>(r.hidden()));
  for (int i = 0; i < r.hidden(); ++i) h[i] = rng.bernoulli(hp(i)) ? 1 : 0;
  return h;
}

}  // namespace

DbnModel dbn_train(DbnModel m, const std::vector<DbnTrainRow>& rows, const TrainConfig& cfg,
                   Rng& rng) {
  if (rows.empty()) throw std::invalid_argument("dbn train: empty dataset");
  check_rows(m, rows);

  std::vector<BitVec> cur;
  cur.reserve(rows.size());
  for (const auto& row : rows) cur.push_back(row.visible);

  for (std::size_t l = 0; l + 1 < m.layers.size(); ++l) {
    m.layers[l] = rbm_train_cd(std::move(m.layers[l]), cur, cfg, rng);
    for (auto& v : cur) v = sample_hidden_bits(m.layers[l], v, rng);
  }

  std::vector<BitVec> top;
  top.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    BitVec t = cur[i];
    t.insert(t.end(), rows[i].ilp.begin(), rows[i].ilp.end());
    t.push_back(rows[i].label);
    top.push_back(std::move(t));
  }
  m.layers.back() = rbm_train_cd(std::move(m.layers.back()), top, cfg, rng);
  return m;
}

double dbn_label_reconstruction_error(const DbnModel& m, const std::vector<DbnTrainRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("label reconstruction: empty dataset");
  check_rows(m, rows);
  double total = 0.0;
  for (const auto& row : rows) {
    // Mean-field up through the lower layers.
    Eigen::VectorXf x(static_cast<Eigen::Index>(row.visible.size()));
    for (std::size_t i = 0; i < row.visible.size(); ++i)
      x(static_cast<Eigen::Index>(i)) = row.visible[i];
    for (std::size_t l = 0; l + 1 < m.layers.size(); ++l) {
      x = sigmoid(m.layers[l].W * x + m.layers[l].c);
    }
    const Rbm& top = m.layers.back();
    Eigen::VectorXf v(top.visible());
    v.head(x.size()) = x;
    for (int j = 0; j < m.ilp_feature_count; ++j) v(m.code_size() + j) = row.ilp[j];
    v(m.separator_index()) = row.label;
    Eigen::VectorXf hp = sigmoid(top.W * v + top.c);
    Eigen::VectorXf vp = sigmoid(top.W.transpose() * hp + top.b);
    total += std::abs(static_cast<double>(vp(m.separator_index())) - row.label);
  }
  return total / static_cast<double>(rows.size());
}

std::vector<RawSample> dbn_sample(const DbnModel& m, const ClampSet& clamps, int n,
                                  const TrainConfig& cfg, Rng& rng,
                                  const SweepObserver& observer) {
  if (n < 1) throw std::invalid_argument("dbn sample: n must be >= 1");
  const Rbm& top = m.layers.back();
  std::vector<std::uint8_t> is_clamped(static_cast<std::size_t>(top.visible()), 0);
  for (auto& [idx, bit] : clamps) {
    if (idx < 0 || idx >= top.visible())
      throw std::invalid_argument("dbn sample: clamp index out of range");
    if (bit > 1) throw std::invalid_argument("dbn sample: clamp bit must be 0 or 1");
    if (is_clamped[idx]) throw std::invalid_argument("dbn sample: duplicate clamp index");
    is_clamped[idx] = 1;
  }

  std::vector<RawSample> out;
  out.reserve(static_cast<std::size_t>(n));
  const int code = m.code_size();

  for (int s = 0; s < n; ++s) {
    Eigen::VectorXf v(top.visible());
    for (int i = 0; i < top.visible(); ++i) v(i) = rng.bernoulli(0.5) ? 1.0f : 0.0f;
    for (auto& [idx, bit] : clamps) v(idx) = bit;

    Eigen::VectorXf vp = Eigen::VectorXf::Constant(top.visible(), 0.5f);
    BitVec vb(static_cast<std::size_t>(top.visible()));
    for (int sweep = 1; sweep <= cfg.gibbs_steps_sampling; ++sweep) {
      Eigen::VectorXf hp = sigmoid(top.W * v + top.c);
      Eigen::VectorXf h(top.hidden());
      for (int i = 0; i < top.hidden(); ++i) h(i) = rng.bernoulli(hp(i)) ? 1.0f : 0.0f;
      vp = sigmoid(top.W.transpose() * h + top.b);
      for (int i = 0; i < top.visible(); ++i) v(i) = rng.bernoulli(vp(i)) ? 1.0f : 0.0f;
      for (auto& [idx, bit] : clamps) v(idx) = bit;
      if (observer) {
        for (int i = 0; i < top.visible(); ++i) vb[i] = v(i) > 0.5f ? 1 : 0;
        observer(sweep, vb);
      }
    }

    RawSample raw;
    raw.bits.resize(static_cast<std::size_t>(code));
    raw.probs.resize(static_cast<std::size_t>(code));
    for (int i = 0; i < code; ++i) {
      raw.bits[i] = v(i) > 0.5f ? 1 : 0;
      raw.probs[i] = vp(i);
    }
    // Top-down generation through the lower layers.
    for (std::size_t li = m.layers.size() - 1; li-- > 0;) {
      const Rbm& r = m.layers[li];
      Eigen::VectorXf hid(r.hidden());
      for (int i = 0; i < r.hidden(); ++i) hid(i) = raw.bits[i];
      Eigen::VectorXf p = sigmoid(r.W.transpose() * hid + r.b);
      raw.bits.resize(static_cast<std::size_t>(r.visible()));
      raw.probs.resize(static_cast<std::size_t>(r.visible()));
      for (int i = 0; i < r.visible(); ++i) {
        raw.probs[i] = p(i);
        raw.bits[i] = rng.bernoulli(p(i)) ? 1 : 0;
      }
    }
    out.push_back(std::move(raw));
  }
  return out;
}

DbnModel dbn_warm_start(const DbnModel& prev, int new_ilp_feature_count, float weight_init_scale,
                        Rng& rng) {
  if (new_ilp_feature_count < prev.ilp_feature_count)
    throw std::invalid_argument("warm start: ilp_feature_count may not shrink");
  DbnModel m = prev;
  if (new_ilp_feature_count == prev.ilp_feature_count) return m;

  // Insert fresh feature columns between the existing feature block and the
  // separator column of the top RBM.
  const Rbm& old_top = prev.layers.back();
  const int grow = new_ilp_feature_count - prev.ilp_feature_count;
  const int old_sep = prev.separator_index();
  Rbm top;
  top.W.resize(old_top.hidden(), old_top.visible() + grow);
  top.W.leftCols(old_sep) = old_top.W.leftCols(old_sep);
  for (int g = 0; g < grow; ++g) {
    for (int i = 0; i < old_top.hidden(); ++i) {
      top.W(i, old_sep + g) = weight_init_scale * static_cast<float>(rng.normal());
    }
  }
  top.W.col(old_sep + grow) = old_top.W.col(old_sep);
  top.b.resize(old_top.visible() + grow);
  top.b.head(old_sep) = old_top.b.head(old_sep);
  top.b.segment(old_sep, grow).setZero();
  top.b(old_sep + grow) = old_top.b(old_sep);
  top.c = old_top.c;
  m.layers.back() = std::move(top);
  m.ilp_feature_count = new_ilp_feature_count;
  return m;
}

void save_dbn(const DbnModel& m, const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file for writing: " + p.string());
  f.write("EODBN1", 6);
  write_u32(f, 1);  // container version
  write_u32(f, static_cast<std::uint32_t>(m.layers.size()));
  write_u32(f, static_cast<std::uint32_t>(m.ilp_feature_count));
  for (const auto& r : m.layers) {
    write_u32(f, static_cast<std::uint32_t>(r.hidden()));
    write_u32(f, static_cast<std::uint32_t>(r.visible()));
    for (int i = 0; i < r.hidden(); ++i) {
      for (int j = 0; j < r.visible(); ++j) write_f32(f, r.W(i, j));
    }
    for (int j = 0; j < r.visible(); ++j) write_f32(f, r.b(j));
    for (int i = 0; i < r.hidden(); ++i) write_f32(f, r.c(i));
  }
  if (!f) throw std::runtime_error("short write to model file: " + p.string());
}

DbnModel load_dbn(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file: " + p.string());
  char magic[6];
  f.read(magic, 6);
  if (!f || std::string(magic, 6) != "EODBN1")
    throw std::runtime_error("model file has wrong magic: " + p.string());
  std::uint32_t version = read_u32(f);
  if (version != 1) throw std::runtime_error("unsupported model container version");
  std::uint32_t n_layers = read_u32(f);
  std::uint32_t ilp = read_u32(f);
  if (n_layers < 1 || n_layers > 64) throw std::runtime_error("model layer count out of range");
  DbnModel m;
  m.ilp_feature_count = static_cast<int>(ilp);
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    std::uint32_t hidden = read_u32(f), visible = read_u32(f);
    if (hidden < 1 || visible < 1 || hidden > 65536 || visible > 65536)
      throw std::runtime_error("model layer dimensions out of range");
    Rbm r;
    r.W.resize(hidden, visible);
    for (std::uint32_t i = 0; i < hidden; ++i) {
      for (std::uint32_t j = 0; j < visible; ++j) r.W(i, j) = read_f32(f);
    }
    r.b.resize(visible);
    for (std::uint32_t j = 0; j < visible; ++j) r.b(j) = read_f32(f);
    r.c.resize(hidden);
    for (std::uint32_t i = 0; i < hidden; ++i) r.c(i) = read_f32(f);
    m.layers.push_back(std::move(r));
  }
  // Dimension chain: lower layers connect hidden->visible; the top layer's visible
  // is the previous hidden plus the feature block plus the separator.
  for (std::size_t l = 0; l + 1 < m.layers.size(); ++l) {
    int expect = l + 2 == m.layers.size()
                     ? m.layers[l].hidden() + m.ilp_feature_count + 1
                     : m.layers[l].hidden();
    if (m.layers[l + 1].visible() != expect)
      throw std::runtime_error("model layer dimensions inconsistent");
  }
  if (m.layers.size() == 1 && m.layers[0].visible() <= m.ilp_feature_count + 1)
    throw std::runtime_error("model layer dimensions inconsistent");
  return m;
}

}  // namespace eoda
