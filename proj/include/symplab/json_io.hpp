// JSON (and CSV) serialization of the library's domain types, matching the
// schemas shipped under /schemas. Matrices serialize as arrays of rows,
// angles in radians, paths as {n, samples: [[t, rows...], ...]}.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "symplab/constructions.hpp"
#include "symplab/cz.hpp"
#include "symplab/experiment.hpp"
#include "symplab/orbits.hpp"
#include "symplab/path.hpp"
#include "symplab/primes.hpp"

namespace symplab {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json path_to_json(const SymplecticPath& path);
SymplecticPath path_from_json(const Json& j);

Json index_report_to_json(const IndexReport& report);

// Input schema: {n, quadratic: {type: "diagonal", angles: [...]} |
// {type: "general", samples: [[rows...], ...]}, bumps: [{q: [...], s,
// coeff: {const, cos: [...], sin: [...]}}]}.
AsymQuadHamiltonian hamiltonian_from_json(const Json& j);

Json fixed_point_to_json(const FixedPointRecord& rec);
Json census_to_json(const std::map<int, std::vector<FixedPointRecord>>& table);
std::string census_csv(const std::map<int, std::vector<FixedPointRecord>>& table);

Json pipeline_pair_to_json(const PipelinePair& pair);

Json classification_to_json(const AngleClassification& cls);
Json sequence_to_json(const NonResonantSequence& seq);
NonResonantSequence sequence_from_json(const Json& j);
Json statistics_to_json(const PrimeStatistics& stats);

// Flat little-endian u64 list for large prime sets.
void write_primes_u64(const std::string& file,
                      const std::vector<std::uint64_t>& primes);
std::vector<std::uint64_t> read_primes_u64(const std::string& file);

Json ledger_to_json(const ProofLedger& ledger);
Json toy_report_to_json(const ToyCensusReport& report);
ToyModelSpec toy_spec_from_json(const Json& j);

}  // namespace symplab
