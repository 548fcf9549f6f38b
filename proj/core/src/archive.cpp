#include "bsim/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "bsim/errors.hpp"

namespace bsim {

namespace {

constexpr char kMagic[8] = {'B', 'S', 'I', 'M', 'D', 'R', 'A', 'W'};

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { little(v, 4); }
  void u64(std::uint64_t v) { little(v, 8); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void vec(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }
  void raw(const char* data, std::size_t n) { bytes_.insert(bytes_.end(), data, data + n); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  void little(std::uint64_t v, int width) {
    for (int k = 0; k < width; ++k) {
      bytes_.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
    }
  }
  std::vector<char> bytes_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(little(4)); }
  std::uint64_t u64() { return little(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    const char* p = take(n);
    return std::string(p, n);
  }
  Vector vec(std::size_t n) {
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = f64();
    return v;
  }
  const char* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw DataError("draw archive is truncated");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::uint64_t little(int width) {
    const char* p = take(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int k = 0; k < width; ++k) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[k])) << (8 * k);
    }
    return v;
  }
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

SplineSystem ModelArchive::system() const {
  return SplineSystem(BSplineBasis(knots, degree), pi0, pi1);
}

void write_archive(const std::string& path, const ModelArchive& a) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kArchiveVersion);
  w.u64(a.config_hash);
  w.u64(a.seed);
  w.str(a.config_text);
  w.u8(static_cast<std::uint8_t>(a.family_kind));
  w.f64(a.dispersion);
  w.u32(static_cast<std::uint32_t>(a.degree));
  w.u32(static_cast<std::uint32_t>(a.knots.size()));
  for (const double k : a.knots) w.f64(k);
  w.f64(a.pi0);
  w.f64(a.pi1);
  w.f64(a.rho);
  w.f64(a.lambda_prior);
  const auto l = static_cast<std::uint32_t>(a.knots.size()) -
                 static_cast<std::uint32_t>(a.degree) - 1;
  w.u32(static_cast<std::uint32_t>(a.main_names.size()));
  w.u32(static_cast<std::uint32_t>(a.index_names.size()));
  w.u32(l);
  for (const auto& n : a.main_names) w.str(n);
  for (const auto& n : a.index_names) w.str(n);
  w.vec(a.beta0);
  w.vec(a.beta_init);
  w.u32(static_cast<std::uint32_t>(a.n_chains));
  for (int c = 0; c < a.n_chains; ++c) {
    w.f64(static_cast<std::size_t>(c) < a.draws.chain_acceptance.size()
              ? a.draws.chain_acceptance[static_cast<std::size_t>(c)]
              : 0.0);
  }
  w.f64(a.draws.acceptance_rate);
  w.i64(a.draws.rejected_on_error);
  w.i64(a.draws.unconverged_scoring);
  w.u64(a.draws.states.size());
  for (std::size_t s = 0; s < a.draws.states.size(); ++s) {
    const auto& st = a.draws.states[s];
    if (static_cast<std::size_t>(st.m.size()) != a.main_names.size() ||
        static_cast<std::size_t>(st.beta.size()) != a.index_names.size() ||
        st.gamma.size() != static_cast<Eigen::Index>(l)) {
      throw DataError("write_archive: state dimensions disagree with header");
    }
    w.u32(static_cast<std::uint32_t>(s < a.draws.chain.size() ? a.draws.chain[s] : 0));
    w.vec(st.m);
    w.vec(st.beta);
    w.vec(st.gamma);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw DataError("failed writing '" + path + "'");
}

ModelArchive read_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open draw archive '" + path + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  Reader r(std::move(bytes));
  if (std::memcmp(r.take(sizeof kMagic), kMagic, sizeof kMagic) != 0) {
    throw DataError("'" + path + "' is not a bsim draw archive");
  }
  const auto version = r.u32();
  if (version != kArchiveVersion) {
    throw DataError("unsupported draw archive version " + std::to_string(version));
  }
  ModelArchive a;
  a.config_hash = r.u64();
  a.seed = r.u64();
  a.config_text = r.str();
  const auto fam = r.u8();
  if (fam > 2) throw DataError("draw archive: unknown family code");
  a.family_kind = static_cast<FamilyKind>(fam);
  a.dispersion = r.f64();
  a.degree = static_cast<int>(r.u32());
  a.knots.resize(r.u32());
  for (auto& k : a.knots) k = r.f64();
  a.pi0 = r.f64();
  a.pi1 = r.f64();
  a.rho = r.f64();
  a.lambda_prior = r.f64();
  const auto p_main = r.u32();
  const auto p_index = r.u32();
  const auto l = r.u32();
  for (std::uint32_t j = 0; j < p_main; ++j) a.main_names.push_back(r.str());
  for (std::uint32_t j = 0; j < p_index; ++j) a.index_names.push_back(r.str());
  a.beta0 = r.vec(p_index);
  a.beta_init = r.vec(p_index);
  a.n_chains = static_cast<int>(r.u32());
  for (int c = 0; c < a.n_chains; ++c) a.draws.chain_acceptance.push_back(r.f64());
  a.draws.acceptance_rate = r.f64();
  a.draws.rejected_on_error = r.i64();
  a.draws.unconverged_scoring = r.i64();
  const auto n_states = r.u64();

  const SplineSystem system = a.system();
  if (system.l() != static_cast<int>(l)) {
    throw DataError("draw archive: basis size disagrees with knot vector");
  }
  a.draws.states.reserve(n_states);
  for (std::uint64_t s = 0; s < n_states; ++s) {
    a.draws.chain.push_back(static_cast<int>(r.u32()));
    ParameterState st;
    st.m = r.vec(p_main);
    st.beta = r.vec(p_index);
    st.gamma = r.vec(l);
    st.gamma_tilde = system.constrain(st.gamma);
    a.draws.states.push_back(std::move(st));
  }
  if (!r.done()) throw DataError("draw archive has trailing bytes");
  return a;
}

}  // namespace bsim
