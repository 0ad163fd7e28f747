#include "haarfact/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace haarfact {

Json interval_to_json(const DyadicInterval& I) { return Json::array({I.level, I.pos}); }

DyadicInterval interval_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("interval must be [level, pos]");
  }
  DyadicInterval I{j[0].get<int>(), j[1].get<std::int64_t>()};
  iota_index(I);  // validates the range
  return I;
}

Json spec_to_json(const SpaceSpec& spec) {
  Json j;
  if (std::isinf(spec.p)) {
    j["p"] = "inf";
  } else {
    j["p"] = spec.p;
  }
  j["rademacher"] =
      spec.mode == RademacherMode::Constant ? "constant" : "independent";
  return j;
}

SpaceSpec spec_from_json(const Json& j) {
  SpaceSpec spec;
  const auto& p = j.at("p");
  spec.p = p.is_string() ? (p.get<std::string>() == "inf"
                                ? kInfiniteExponent
                                : throw std::invalid_argument("unknown p string"))
                         : p.get<double>();
  const auto mode = j.at("rademacher").get<std::string>();
  if (mode == "constant") {
    spec.mode = RademacherMode::Constant;
  } else if (mode == "independent") {
    spec.mode = RademacherMode::Independent;
  } else {
    throw std::invalid_argument("unknown rademacher mode: " + mode);
  }
  validate_spec(spec);
  return spec;
}

Json vector_to_json(const HaarVector& x) {
  validate_vector(x);
  Json j;
  j["ambient"] = x.ambient;
  j["coeffs"] = std::vector<double>(x.coeffs.data(), x.coeffs.data() + x.coeffs.size());
  return j;
}

HaarVector vector_from_json(const Json& j) {
  HaarVector x;
  x.ambient = j.at("ambient").get<int>();
  const auto coeffs = j.at("coeffs").get<std::vector<double>>();
  x.coeffs = Eigen::Map<const Eigen::VectorXd>(coeffs.data(),
                                               static_cast<Eigen::Index>(coeffs.size()));
  validate_vector(x);
  return x;
}

Json operator_to_json(const OperatorMatrix& T) {
  Json j;
  j["format"] = "dense";
  j["domain"] = T.domain();
  j["codomain"] = T.codomain();
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < T.entries().rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < T.entries().cols(); ++c) row.push_back(T.entries()(r, c));
    rows.push_back(std::move(row));
  }
  j["data"] = std::move(rows);
  if (T.norm_bound()) j["norm_bound"] = *T.norm_bound();
  return j;
}

Json multiplier_to_json(const HaarMultiplier& M) {
  validate_multiplier(M);
  Json j;
  j["format"] = "multiplier";
  j["ambient"] = M.ambient;
  j["entries"] =
      std::vector<double>(M.entries.data(), M.entries.data() + M.entries.size());
  return j;
}

HaarMultiplier multiplier_from_json(const Json& j) {
  if (j.value("format", "multiplier") != std::string("multiplier")) {
    throw std::invalid_argument("not a multiplier");
  }
  HaarMultiplier M;
  M.ambient = j.at("ambient").get<int>();
  const auto entries = j.at("entries").get<std::vector<double>>();
  M.entries = Eigen::Map<const Eigen::VectorXd>(entries.data(),
                                                static_cast<Eigen::Index>(entries.size()));
  validate_multiplier(M);
  return M;
}

OperatorMatrix operator_from_json(const Json& j) {
  const auto format = j.value("format", "dense");
  if (format == "multiplier") return multiplier_from_json(j).to_operator();
  if (format != "dense") throw std::invalid_argument("unknown operator format: " + format);
  const int domain = j.at("domain").get<int>();
  const int codomain = j.at("codomain").get<int>();
  const auto& data = j.at("data");
  Eigen::MatrixXd m(y_dim(codomain), y_dim(domain));
  if (!data.is_array() || data.size() != static_cast<std::size_t>(m.rows())) {
    throw std::invalid_argument("row count does not match the codomain level");
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = data[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(m.cols())) {
      throw std::invalid_argument("column count does not match the domain level");
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  OperatorMatrix T(domain, codomain, std::move(m));
  if (j.contains("norm_bound")) T.set_norm_bound(j["norm_bound"].get<double>());
  return T;
}

Json system_to_json(const AlmostFaithfulSystem& sys) {
  Json j;
  j["n"] = sys.n;
  j["ambient"] = sys.ambient;
  Json blocks = Json::array();
  for (const auto& block : sys.blocks) {
    Json entries = Json::array();
    for (const auto& [K, theta] : block) {
      entries.push_back(Json{{"interval", interval_to_json(K)}, {"sign", theta}});
    }
    blocks.push_back(std::move(entries));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

AlmostFaithfulSystem system_from_json(const Json& j) {
  AlmostFaithfulSystem sys;
  sys.n = j.at("n").get<int>();
  sys.ambient = j.at("ambient").get<int>();
  for (const auto& block : j.at("blocks")) {
    std::vector<SignedInterval> entries;
    for (const auto& e : block) {
      entries.push_back(
          {interval_from_json(e.at("interval")), e.at("sign").get<int>()});
    }
    sys.blocks.push_back(std::move(entries));
  }
  if (sys.blocks.size() != static_cast<std::size_t>(y_dim(sys.n))) {
    throw std::invalid_argument("block count does not match the index tree");
  }
  return sys;
}

Json certificate_to_json(const FactorizationCertificate& cert) {
  Json j;
  j["A"] = operator_to_json(cert.A);
  j["B"] = operator_to_json(cert.B);
  j["target"] = cert.target == FactorTarget::T ? "T" : "I-T";
  j["projectional"] = cert.projectional;
  j["constant_bound"] = cert.constant_bound;
  j["error_bound"] = cert.error_bound;
  j["residual"] = cert.residual;
  j["c"] = cert.c;
  j["ntilde_used"] = cert.ntilde_used;
  j["m_used"] = cert.m_used;
  j["ntilde_required"] = cert.ntilde_required;
  j["m_required"] = cert.m_required;
  return j;
}

FactorizationCertificate certificate_from_json(const Json& j) {
  FactorizationCertificate cert;
  cert.A = operator_from_json(j.at("A"));
  cert.B = operator_from_json(j.at("B"));
  const auto target = j.at("target").get<std::string>();
  if (target == "T") {
    cert.target = FactorTarget::T;
  } else if (target == "I-T") {
    cert.target = FactorTarget::IdentityMinusT;
  } else {
    throw std::invalid_argument("unknown target: " + target);
  }
  cert.projectional = j.at("projectional").get<bool>();
  cert.constant_bound = j.at("constant_bound").get<double>();
  cert.error_bound = j.at("error_bound").get<double>();
  cert.residual = j.at("residual").get<double>();
  cert.c = j.at("c").get<double>();
  cert.ntilde_used = j.value("ntilde_used", 0);
  cert.m_used = j.value("m_used", 0);
  cert.ntilde_required = j.value("ntilde_required", std::string{});
  cert.m_required = j.value("m_required", 0);
  return cert;
}

void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return Json::parse(in);
}

std::string diagonal_csv(const OperatorMatrix& T) {
  const Eigen::VectorXd d = diagonal(T);
  std::ostringstream out;
  out << "iota,level,pos,entry\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const DyadicInterval I = from_iota(i + 1);
    out << (i + 1) << ',' << I.level << ',' << I.pos << ',' << d[i] << '\n';
  }
  return out.str();
}

}  // namespace haarfact
