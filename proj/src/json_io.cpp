#include "robustsense/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace robustsense {

namespace {

Relation relation_from_name(const std::string& s) {
  if (s == "<=") return Relation::LessEqual;
  if (s == "=") return Relation::Equal;
  if (s == ">=") return Relation::GreaterEqual;
  throw std::invalid_argument("unknown relation '" + s + "'");
}

nlohmann::json term_to_json(const Term& t) {
  nlohmann::json j;
  if (const auto* ne = std::get_if<NegExpDetection>(&t)) {
    j["kind"] = "detection";
    j["weight"] = ne->weight;
    j["rate_scale"] = ne->rate_scale;
    j["var"] = ne->var;
    return j;
  }
  const auto& p = std::get<BilinearAffinePiece>(t);
  j["kind"] = "affine_piece";
  j["slope"] = p.slope;
  j["intercept"] = p.intercept;
  j["base"] = p.base;
  nlohmann::json loads = nlohmann::json::array();
  for (const auto& l : p.loadings)
    loads.push_back({{"param", l.param}, {"var", l.var}, {"coeff", l.coeff}});
  j["loadings"] = std::move(loads);
  return j;
}

Term term_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "detection") {
    NegExpDetection ne;
    ne.weight = j.at("weight").get<double>();
    ne.rate_scale = j.at("rate_scale").get<double>();
    ne.var = j.at("var").get<int>();
    return ne;
  }
  if (kind == "affine_piece") {
    BilinearAffinePiece p;
    p.slope = j.at("slope").get<double>();
    p.intercept = j.at("intercept").get<double>();
    p.base = j.at("base").get<double>();
    for (const auto& l : j.at("loadings")) {
      p.loadings.push_back(Loading{l.at("param").get<int>(), l.at("var").get<int>(),
                                   l.at("coeff").get<double>()});
    }
    return p;
  }
  throw std::invalid_argument("unknown term kind '" + kind + "'");
}

}  // namespace

nlohmann::json instance_to_json(const ProblemInstance& inst) {
  nlohmann::json j;
  nlohmann::json vars = nlohmann::json::array();
  for (int v = 0; v < inst.feasible.n_vars(); ++v) {
    vars.push_back({{"lower", inst.feasible.bounds[v].lower},
                    {"upper", inst.feasible.bounds[v].upper},
                    {"binary", inst.feasible.is_binary(v)}});
  }
  j["variables"] = std::move(vars);
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : inst.feasible.constraints) {
    cons.push_back(
        {{"coeffs", c.coeffs}, {"rel", relation_name(c.rel)}, {"rhs", c.rhs}});
  }
  j["constraints"] = std::move(cons);
  j["f0"] = inst.f0;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& blk : inst.blocks) {
    nlohmann::json b;
    b["norm"] = norm_name(blk.norm);
    b["nominal"] = blk.nominal;
    b["perturbable"] = blk.perturbable;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : blk.terms) terms.push_back(term_to_json(t));
    b["terms"] = std::move(terms);
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

ProblemInstance instance_from_json(const nlohmann::json& j) {
  ProblemInstance inst;
  bool seen_binary = false;
  for (const auto& v : j.at("variables")) {
    const bool binary = v.at("binary").get<bool>();
    if (binary) {
      seen_binary = true;
      ++inst.feasible.n_bin;
    } else {
      if (seen_binary)
        throw std::invalid_argument("continuous variables must precede binary ones");
      ++inst.feasible.n_cont;
    }
    inst.feasible.bounds.push_back(
        VarBounds{v.at("lower").get<double>(), v.at("upper").get<double>()});
  }
  for (const auto& c : j.at("constraints")) {
    LinearConstraint lc;
    lc.coeffs = c.at("coeffs").get<std::vector<double>>();
    lc.rel = relation_from_name(c.at("rel").get<std::string>());
    lc.rhs = c.at("rhs").get<double>();
    inst.feasible.constraints.push_back(std::move(lc));
  }
  inst.f0 = j.at("f0").get<std::vector<double>>();
  for (const auto& b : j.at("blocks")) {
    MaxBlock blk;
    blk.norm = norm_from_name(b.at("norm").get<std::string>());
    blk.nominal = b.at("nominal").get<std::vector<double>>();
    blk.perturbable = b.at("perturbable").get<bool>();
    for (const auto& t : b.at("terms")) blk.terms.push_back(term_from_json(t));
    inst.blocks.push_back(std::move(blk));
  }
  validate(inst);
  return inst;
}

std::string serialize_instance(const ProblemInstance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file '" + path + "'");
  nlohmann::json j;
  in >> j;
  return instance_from_json(j);
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write instance file '" + path + "'");
  out << serialize_instance(inst);
}

}  // namespace robustsense
