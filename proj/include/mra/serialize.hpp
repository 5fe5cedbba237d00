#ifndef MRA_SERIALIZE_HPP
#define MRA_SERIALIZE_HPP

#include <json.hpp>
#include <string>

#include "mra/certify.hpp"
#include "mra/models.hpp"
#include "mra/moment.hpp"
#include "mra/rep.hpp"
#include "mra/solver.hpp"

namespace mra {

using nlohmann::json;

// JSON layout: complex numbers as [re, im]; matrices as row-major nested
// arrays; spec as {"blocks": [{"dim", "mult", "parity"}], "field"}.

json to_json(const Cplx& z);
json to_json(const MatrixXcd& m);
json to_json(const RepSpec& spec);
json to_json(const BlockSignal& f);
json to_json(const GramMoment& g);
json to_json(const SparseBasis& b);
json to_json(const Certificate& c);
json to_json(const RecoveryResult& r);

Cplx complex_from_json(const json& j);
MatrixXcd matrix_from_json(const json& j);
RepSpec spec_from_json(const json& j);
BlockSignal signal_from_json(const json& j);
GramMoment grams_from_json(const json& j);
SparseBasis basis_from_json(const json& j);

/// A simulated observation batch together with the metadata needed to
/// reproduce or debias it.
struct ObservationBatch {
  int dim = 0;
  double sigma = 0;
  std::uint64_t seed = 0;
  std::vector<VectorXcd> samples;
};

/// Binary layout: magic "MRA2", u32 version (1), u64 n, u64 dim, f64 sigma,
/// u64 seed, then n*dim little-endian f64 pairs (re, im).
void write_batch(const std::string& path, const ObservationBatch& batch);
ObservationBatch read_batch(const std::string& path);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace mra

#endif
