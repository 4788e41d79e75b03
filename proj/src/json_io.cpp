#include "symplab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace symplab {

namespace {

double get_num(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ValidationError(std::string("json: missing numeric field '") + key +
                          "'");
  }
  return j[key].get<double>();
}

Json interval_to_json(const DegreeInterval& iv) {
  return Json{{"lo", iv.lo}, {"hi", iv.hi}};
}

Json window_to_json(const ActionWindow& w) {
  return Json{{"lo", w.lo}, {"hi", w.hi}};
}

}  // namespace

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ValidationError("json: matrix must be an array of rows");
  }
  const auto rows = j.size();
  const auto cols = j[0].size();
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) {
      throw ValidationError("json: ragged matrix rows");
    }
    for (std::size_t k = 0; k < cols; ++k) M(i, k) = j[i][k].get<double>();
  }
  return M;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("json: vector must be an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Json path_to_json(const SymplecticPath& path) {
  Json samples = Json::array();
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    Json entry = Json::array();
    entry.push_back(path.times[i]);
    const Matrix& M = path.samples[i];
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
      entry.push_back(std::move(row));
    }
    samples.push_back(std::move(entry));
  }
  Json out{{"n", path.n}, {"samples", std::move(samples)}};
  if (path.diagonal_angles) out["diagonal_angles"] = *path.diagonal_angles;
  return out;
}

SymplecticPath path_from_json(const Json& j) {
  SymplecticPath path;
  path.n = j.at("n").get<int>();
  const int d = 2 * path.n;
  for (const auto& entry : j.at("samples")) {
    if (!entry.is_array() ||
        entry.size() != static_cast<std::size_t>(d) + 1) {
      throw ValidationError("json: path sample must be [t, rows...]");
    }
    path.times.push_back(entry[0].get<double>());
    Matrix M(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) M(r, c) = entry[r + 1][c].get<double>();
    }
    path.samples.push_back(std::move(M));
  }
  if (j.contains("diagonal_angles")) {
    path.diagonal_angles = j["diagonal_angles"].get<std::vector<double>>();
  }
  path.validate();
  return path;
}

Json index_report_to_json(const IndexReport& report) {
  const char* method = "winding";
  if (report.method == IndexMethod::crossing_oracle) {
    method = "crossing_oracle";
  } else if (report.method == IndexMethod::closed_form_diagonal) {
    method = "closed_form_diagonal";
  }
  return Json{{"cz", report.cz},
              {"mean", report.mean},
              {"degenerate_endpoint", report.degenerate_endpoint},
              {"endpoint_margin", report.endpoint_margin},
              {"method", method}};
}

AsymQuadHamiltonian hamiltonian_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  if (n < 1) throw ValidationError("json: hamiltonian needs n >= 1");

  std::vector<Bump> bumps;
  if (j.contains("bumps")) {
    for (const auto& bj : j["bumps"]) {
      Bump b;
      b.center = vector_from_json(bj.at("q"));
      if (b.center.size() != 2 * n) {
        throw ValidationError("json: bump center has wrong dimension");
      }
      b.width = get_num(bj, "s");
      if (!(b.width > 0.0)) {
        throw ValidationError("json: bump width must be > 0");
      }
      const Json& c = bj.at("coeff");
      if (c.contains("const")) b.coeff.c0 = c["const"].get<double>();
      if (c.contains("cos")) b.coeff.cos_c = c["cos"].get<std::vector<double>>();
      if (c.contains("sin")) b.coeff.sin_c = c["sin"].get<std::vector<double>>();
      bumps.push_back(std::move(b));
    }
  }

  const Json& q = j.at("quadratic");
  const std::string type = q.at("type").get<std::string>();
  if (type == "diagonal") {
    auto angles = q.at("angles").get<std::vector<double>>();
    if (angles.size() != static_cast<std::size_t>(n)) {
      throw ValidationError("json: need one angle per coordinate plane");
    }
    return AsymQuadHamiltonian::diagonal(std::move(angles), std::move(bumps));
  }
  if (type == "general") {
    std::vector<Matrix> samples;
    for (const auto& sj : q.at("samples")) {
      Matrix A = matrix_from_json(sj);
      if (A.rows() != 2 * n || A.cols() != 2 * n) {
        throw ValidationError("json: quadratic sample has wrong dimension");
      }
      samples.push_back(std::move(A));
    }
    return AsymQuadHamiltonian::general(std::move(samples), std::move(bumps));
  }
  throw ValidationError("json: quadratic type must be 'diagonal' or 'general'");
}

Json fixed_point_to_json(const FixedPointRecord& rec) {
  Json out{{"z", vector_to_json(rec.z)},
           {"action", rec.action},
           {"cz", rec.cz},
           {"mean_cz", rec.mean_cz},
           {"margin", rec.margin},
           {"twist", rec.twist},
           {"primitive_period", rec.primitive_period},
           {"degenerate", rec.degenerate},
           {"family", rec.family},
           {"visibility", rec.visibility}};
  if (rec.lefschetz) out["lefschetz"] = *rec.lefschetz;
  return out;
}

Json census_to_json(
    const std::map<int, std::vector<FixedPointRecord>>& table) {
  Json periods = Json::array();
  for (const auto& [period, recs] : table) {
    Json list = Json::array();
    for (const auto& rec : recs) list.push_back(fixed_point_to_json(rec));
    periods.push_back(Json{{"period", period}, {"records", std::move(list)}});
  }
  return Json{{"periods", std::move(periods)}};
}

std::string census_csv(
    const std::map<int, std::vector<FixedPointRecord>>& table) {
  std::ostringstream os;
  os << "period,primitive_period,z_norm,action,cz,mean_cz,margin,twist,"
        "degenerate,family,visibility\n";
  for (const auto& [period, recs] : table) {
    for (const auto& rec : recs) {
      os << period << ',' << rec.primitive_period << ',' << rec.z.norm()
         << ',' << rec.action << ',' << rec.cz << ',' << rec.mean_cz << ','
         << rec.margin << ',' << (rec.twist ? 1 : 0) << ','
         << (rec.degenerate ? 1 : 0) << ',' << rec.family << ','
         << rec.visibility << '\n';
    }
  }
  return os.str();
}

Json pipeline_pair_to_json(const PipelinePair& pair) {
  Json fps = Json::array();
  for (const auto& fp : pair.fixed_points) {
    fps.push_back(Json{{"z", vector_to_json(fp.z)},
                       {"action_k", fp.action_k},
                       {"action_F", fp.action_F},
                       {"cz_k", fp.cz_k},
                       {"cz_F", fp.cz_F},
                       {"residual_F", fp.residual_F}});
  }
  return Json{{"k", pair.k},
              {"l", pair.l},
              {"sigma", pair.sigma},
              {"mu", pair.mu},
              {"R0", pair.R0},
              {"R1", pair.R1},
              {"C0", pair.C0},
              {"C1", pair.C1},
              {"shift_bound", pair.shift_bound},
              {"shift_measured", pair.shift_measured},
              {"fixed_points", std::move(fps)}};
}

Json classification_to_json(const AngleClassification& cls) {
  Json rational = Json::array();
  for (const auto& f : cls.rational) {
    rational.push_back(Json{{"num", f.num}, {"den", f.den}});
  }
  Json relations = Json::array();
  for (const auto& rel : cls.relations) {
    Json coeffs = Json::array();
    for (const auto& c : rel.coeffs) {
      coeffs.push_back(Json{{"num", c.num}, {"den", c.den}});
    }
    relations.push_back(Json{
        {"coeffs", std::move(coeffs)},
        {"offset", Json{{"num", rel.offset.num}, {"den", rel.offset.den}}},
        {"value", rel.value}});
  }
  return Json{{"rational", std::move(rational)},
              {"irrational_generators", cls.irrational_generators},
              {"relations", std::move(relations)},
              {"ambiguous", cls.ambiguous},
              {"tolerance", cls.tolerance},
              {"max_denominator", cls.max_denominator}};
}

Json sequence_to_json(const NonResonantSequence& seq) {
  Json gaps = Json::array();
  for (const auto& g : seq.gap_table) {
    gaps.push_back(Json{{"j", g.j}, {"m", g.m}, {"ratio", g.ratio}});
  }
  return Json{{"primes", seq.primes},
              {"c", seq.c},
              {"e", seq.e},
              {"density_estimate", seq.density_estimate},
              {"gap_table", std::move(gaps)},
              {"N", seq.N},
              {"pi_N", seq.pi_N}};
}

NonResonantSequence sequence_from_json(const Json& j) {
  NonResonantSequence seq;
  seq.primes = j.at("primes").get<std::vector<std::uint64_t>>();
  seq.c = get_num(j, "c");
  seq.e = get_num(j, "e");
  seq.density_estimate = j.value("density_estimate", 0.0);
  seq.N = j.value("N", std::uint64_t{0});
  seq.pi_N = j.value("pi_N", std::uint64_t{0});
  if (j.contains("gap_table")) {
    for (const auto& gj : j["gap_table"]) {
      GapEntry g;
      g.j = gj.at("j").get<std::size_t>();
      g.m = gj.at("m").get<int>();
      g.ratio = gj.at("ratio").get<double>();
      seq.gap_table.push_back(g);
    }
  }
  for (std::size_t i = 1; i < seq.primes.size(); ++i) {
    if (seq.primes[i] <= seq.primes[i - 1]) {
      throw ValidationError("json: primes must be strictly increasing");
    }
  }
  return seq;
}

Json statistics_to_json(const PrimeStatistics& stats) {
  Json decades = Json::array();
  for (const auto& d : stats.gap_decades) {
    decades.push_back(
        Json{{"decade", d[0]}, {"median_ratio", d[1]}, {"count", d[2]}});
  }
  return Json{{"density_estimate", stats.density_estimate},
              {"gap_decades", std::move(decades)},
              {"star_discrepancy", stats.star_discrepancy},
              {"torus_measure", stats.torus_measure},
              {"torus_measure_se", stats.torus_measure_se},
              {"mc_samples", stats.mc_samples}};
}

void write_primes_u64(const std::string& file,
                      const std::vector<std::uint64_t>& primes) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ValidationError("cannot open for writing: " + file);
  for (std::uint64_t p : primes) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) {
      buf[i] = static_cast<unsigned char>((p >> (8 * i)) & 0xff);
    }
    os.write(reinterpret_cast<const char*>(buf), 8);
  }
}

std::vector<std::uint64_t> read_primes_u64(const std::string& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ValidationError("cannot open for reading: " + file);
  std::vector<std::uint64_t> out;
  unsigned char buf[8];
  while (is.read(reinterpret_cast<char*>(buf), 8)) {
    std::uint64_t p = 0;
    for (int i = 0; i < 8; ++i) p |= std::uint64_t{buf[i]} << (8 * i);
    out.push_back(p);
  }
  return out;
}

Json ledger_to_json(const ProofLedger& ledger) {
  Json gammas = Json::array();
  for (const auto& g : ledger.gammas) {
    gammas.push_back(Json{{"z", vector_to_json(g.z)},
                          {"mean_cz", g.mean_cz},
                          {"gamma", interval_to_json(g.gamma)},
                          {"equal_mean", g.equal_mean},
                          {"disjoint", g.disjoint}});
  }
  Json out{{"j", ledger.j},
           {"m", ledger.m},
           {"p_j", ledger.p_j},
           {"p_jm", ledger.p_jm},
           {"sigma_jm", ledger.sigma_jm},
           {"n", ledger.n},
           {"a0", ledger.a0},
           {"epsilon", ledger.epsilon},
           {"C", ledger.C},
           {"C_is_measured", ledger.C_is_measured},
           {"windows",
            Json{{"I", window_to_json(ledger.windows.I)},
                 {"I_plus_C", window_to_json(ledger.windows.I_plus_C)},
                 {"I_plus_2C", window_to_json(ledger.windows.I_plus_2C)},
                 {"envelope", window_to_json(ledger.windows.envelope)}}},
           {"windows_ok", ledger.windows_ok},
           {"delta", interval_to_json(ledger.delta)},
           {"gammas", std::move(gammas)},
           {"mean_cz_z0", ledger.mean_cz_z0},
           {"mean_ind_inf", ledger.mean_ind_inf},
           {"gap_bound", ledger.gap_bound},
           {"contradiction_reached", ledger.contradiction_reached}};
  if (ledger.m_star) out["m_star"] = *ledger.m_star;
  return out;
}

Json toy_report_to_json(const ToyCensusReport& report) {
  Json oracle = Json::array();
  for (const auto& fam : report.oracle) {
    oracle.push_back(Json{
        {"p", fam.p}, {"q", fam.q}, {"u", fam.u}, {"radius", fam.radius}});
  }
  Json counts = Json::array();
  for (const auto& [period, count] : report.counts) {
    counts.push_back(Json{{"period", period}, {"count", count}});
  }
  return Json{{"theta0", report.theta0},
              {"theta_inf", report.theta_inf},
              {"twist", report.twist},
              {"integrable", report.integrable},
              {"census", census_to_json(report.census)},
              {"counts", std::move(counts)},
              {"oracle", std::move(oracle)},
              {"note", report.note}};
}

ToyModelSpec toy_spec_from_json(const Json& j) {
  ToyModelSpec spec;
  spec.theta0 = get_num(j, "theta0");
  spec.theta_inf = get_num(j, "theta_inf");
  spec.u_a = j.value("u_a", spec.u_a);
  spec.u_b = j.value("u_b", spec.u_b);
  if (j.contains("max_period")) spec.max_period = j["max_period"].get<int>();
  if (j.contains("bumps")) {
    for (const auto& bj : j["bumps"]) {
      Bump b;
      b.center = vector_from_json(bj.at("q"));
      b.width = get_num(bj, "s");
      const Json& c = bj.at("coeff");
      if (c.contains("const")) b.coeff.c0 = c["const"].get<double>();
      if (c.contains("cos")) b.coeff.cos_c = c["cos"].get<std::vector<double>>();
      if (c.contains("sin")) b.coeff.sin_c = c["sin"].get<std::vector<double>>();
      spec.bumps.push_back(std::move(b));
    }
  }
  return spec;
}

}  // namespace symplab
