#include "mra/serialize.hpp"

#include <cstring>
#include <fstream>

namespace mra {

namespace {

std::string parity_name(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::None: return "none";
  }
  return "none";
}

Parity parity_from_name(const std::string& s) {
  if (s == "even") return Parity::Even;
  if (s == "odd") return Parity::Odd;
  if (s == "none") return Parity::None;
  throw ValidationError("unknown parity: " + s);
}

std::string field_name(Field f) {
  return f == Field::Complex ? "complex" : "real-conjugation-invariant";
}

Field field_from_name(const std::string& s) {
  if (s == "complex") return Field::Complex;
  if (s == "real-conjugation-invariant") return Field::RealInvariant;
  throw ValidationError("unknown field: " + s);
}

}  // namespace

json to_json(const Cplx& z) { return json::array({z.real(), z.imag()}); }

json to_json(const MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const RepSpec& spec) {
  json blocks = json::array();
  for (const auto& b : spec.blocks)
    blocks.push_back({{"dim", b.dim}, {"mult", b.mult}, {"parity", parity_name(b.parity)}});
  return {{"blocks", std::move(blocks)}, {"field", field_name(spec.field)}};
}

json to_json(const BlockSignal& f) {
  json mats = json::array();
  for (const auto& m : f.mats) mats.push_back(to_json(m));
  return {{"spec", to_json(f.spec)}, {"matrices", std::move(mats)}};
}

json to_json(const GramMoment& g) {
  json mats = json::array();
  for (const auto& m : g.grams) mats.push_back(to_json(m));
  return {{"spec", to_json(g.spec)}, {"grams", std::move(mats)}};
}

json to_json(const SparseBasis& b) {
  return {{"basis", to_json(b.vectors)}, {"field", field_name(b.field)}};
}

json to_json(const Certificate& c) {
  json records = json::array();
  for (const auto& r : c.records)
    records.push_back({{"support", r.support},
                       {"other_support", r.other_support},
                       {"self_dim", r.self_dim},
                       {"cross_dim", r.cross_dim},
                       {"gap", r.gap}});
  return {{"K", c.K},
          {"seed", c.seed},
          {"trials", c.trials},
          {"condition1_pass", c.condition1_pass},
          {"condition2_pass", c.condition2_pass},
          {"min_gap", c.min_gap},
          {"verdict", to_string(c.verdict)},
          {"records", std::move(records)}};
}

json to_json(const RecoveryResult& r) {
  const char* status = r.status == SolveStatus::Converged  ? "converged"
                       : r.status == SolveStatus::MaxIters ? "max_iters"
                                                           : "failed";
  return {{"estimate", to_json(r.estimate)},
          {"residual", r.residual},
          {"sparsity_violation", r.sparsity_violation},
          {"status", status},
          {"restarts_used", r.restarts_used}};
}

Cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError("complex value must be a two-element array [re, im]");
  return Cplx(j[0].get<double>(), j[1].get<double>());
}

MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("matrix must be an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw ValidationError("matrix rows have inconsistent lengths");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
  }
  return m;
}

RepSpec spec_from_json(const json& j) {
  RepSpec spec;
  if (!j.contains("blocks") || !j.contains("field"))
    throw ValidationError("spec requires 'blocks' and 'field'");
  for (const auto& b : j.at("blocks"))
    spec.blocks.push_back({b.at("dim").get<int>(), b.at("mult").get<int>(),
                           parity_from_name(b.at("parity").get<std::string>())});
  spec.field = field_from_name(j.at("field").get<std::string>());
  spec.validate();
  return spec;
}

BlockSignal signal_from_json(const json& j) {
  BlockSignal f;
  f.spec = spec_from_json(j.at("spec"));
  for (const auto& m : j.at("matrices")) f.mats.push_back(matrix_from_json(m));
  f.validate();
  return f;
}

GramMoment grams_from_json(const json& j) {
  GramMoment g;
  g.spec = spec_from_json(j.at("spec"));
  for (const auto& m : j.at("grams")) g.grams.push_back(matrix_from_json(m));
  return g;
}

SparseBasis basis_from_json(const json& j) {
  SparseBasis b;
  b.vectors = matrix_from_json(j.at("basis"));
  b.field = field_from_name(j.at("field").get<std::string>());
  b.validate();
  return b;
}

namespace {

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ValidationError("batch file truncated");
  return v;
}

}  // namespace

void write_batch(const std::string& path, const ObservationBatch& batch) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  os.write("MRA2", 4);
  write_raw<std::uint32_t>(os, 1);
  write_raw<std::uint64_t>(os, batch.samples.size());
  write_raw<std::uint64_t>(os, static_cast<std::uint64_t>(batch.dim));
  write_raw<double>(os, batch.sigma);
  write_raw<std::uint64_t>(os, batch.seed);
  for (const auto& s : batch.samples) {
    if (s.size() != batch.dim) throw ValidationError("batch sample dim mismatch");
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      write_raw<double>(os, s[i].real());
      write_raw<double>(os, s[i].imag());
    }
  }
  if (!os) throw ValidationError("write failed: " + path);
}

ObservationBatch read_batch(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "MRA2", 4) != 0)
    throw ValidationError("not a batch file (bad magic): " + path);
  const auto version = read_raw<std::uint32_t>(is);
  if (version != 1) throw ValidationError("unsupported batch version");
  const auto n = read_raw<std::uint64_t>(is);
  const auto dim = read_raw<std::uint64_t>(is);
  ObservationBatch batch;
  batch.dim = static_cast<int>(dim);
  batch.sigma = read_raw<double>(is);
  batch.seed = read_raw<std::uint64_t>(is);
  batch.samples.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    VectorXcd v(batch.dim);
    for (int c = 0; c < batch.dim; ++c) {
      const double re = read_raw<double>(is);
      const double im = read_raw<double>(is);
      v[c] = Cplx(re, im);
    }
    batch.samples.push_back(std::move(v));
  }
  return batch;
}

json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  os << j.dump(2) << '\n';
  if (!os) throw ValidationError("write failed: " + path);
}

}  // namespace mra
