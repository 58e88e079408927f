#include "wbary/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "wbary/errors.hpp"

namespace wbary::io {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing field \"" + key + "\"");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Instance parse_instance_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed instance: ") + e.what());
  }
  Instance inst;
  inst.lambdas = numbers(field(doc, "weights", "instance"), "weights");
  const json& measures = field(doc, "measures", "instance");
  if (!measures.is_array()) throw ParseError("measures: expected an array");
  for (std::size_t i = 0; i < measures.size(); ++i) {
    const std::string where = "measures[" + std::to_string(i) + "]";
    DiscreteMeasure m;
    const json& points = field(measures[i], "points", where);
    if (!points.is_array()) throw ParseError(where + ".points: expected an array");
    for (std::size_t j = 0; j < points.size(); ++j) {
      m.points.push_back(numbers(points[j], where + ".points[" + std::to_string(j) + "]"));
    }
    m.masses = numbers(field(measures[i], "masses", where), where + ".masses");
    inst.measures.push_back(std::move(m));
  }
  validate(inst);
  return inst;
}

Instance parse_instance_csv(const std::string& text) {
  std::map<long, DiscreteMeasure> by_id;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    std::vector<double> values;
    bool numeric = true;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(c, &used));
        if (c.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) {
      if (line_no == 1) continue;  // header
      throw ParseError("line " + std::to_string(line_no) + ": non-numeric field");
    }
    if (values.size() < 3) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected measure_id, at least one coordinate and a mass");
    }
    auto& m = by_id[static_cast<long>(values.front())];
    m.points.emplace_back(values.begin() + 1, values.end() - 1);
    m.masses.push_back(values.back());
  }
  Instance inst;
  for (auto& [id, m] : by_id) inst.measures.push_back(std::move(m));
  inst.lambdas.assign(inst.measures.size(), inst.measures.empty() ? 0.0 : 1.0 / static_cast<double>(inst.measures.size()));
  validate(inst);
  return inst;
}

Instance load_instance(const std::string& path) {
  const std::string text = read_file(path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    return parse_instance_csv(text);
  }
  return parse_instance_json(text);
}

json instance_to_json(const Instance& inst) {
  json doc;
  const Strides strides = make_strides(inst.sizes());
  doc["combinations"] = strides.total;
  doc["weights"] = inst.lambdas;
  doc["measures"] = json::array();
  for (const auto& m : inst.measures) {
    doc["measures"].push_back({{"points", m.points}, {"masses", m.masses}});
  }
  return doc;
}

json result_to_json(const SolveResult& result) {
  json doc;
  doc["objective"] = result.objective;
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["barycenter"] = json::array();
  for (const auto& p : result.barycenter) {
    doc["barycenter"].push_back({{"coords", p.coords}, {"mass", p.mass}, {"assignment", p.assignment}});
  }
  doc["timings"] = {
      {"setup_rm", result.timings.setup_rm},
      {"solve_rm", result.timings.solve_rm},
      {"update_reduced_costs", result.timings.update_reduced_costs},
      {"calc_best_costs", result.timings.calc_best_costs},
      {"solve_pricing", result.timings.solve_pricing},
  };
  doc["trace"] = json::array();
  for (const auto& t : result.trace) {
    doc["trace"].push_back({{"iter", t.iter}, {"rm_obj", t.rm_objective}, {"pricing_obj", t.pricing_objective}});
  }
  return doc;
}

std::string trace_csv(const SolveResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "iter,rm_obj,pricing_obj\n";
  for (const auto& t : result.trace) {
    out << t.iter << ',' << t.rm_objective << ',' << t.pricing_objective << '\n';
  }
  return out.str();
}

Instance generate_instance(const GenOptions& options) {
  if (options.sizes.empty()) throw ContractError("at least one measure size is required");
  if (options.dim < 1) throw ContractError("dimension must be at least 1");
  for (int s : options.sizes) {
    if (s < 1) throw ContractError("measure sizes must be positive");
  }
  make_strides(options.sizes);  // rejects overflow
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  Instance inst;
  for (int size : options.sizes) {
    DiscreteMeasure m;
    for (int j = 0; j < size; ++j) {
      Point x(static_cast<std::size_t>(options.dim));
      for (double& v : x) v = unit(rng);
      m.points.push_back(std::move(x));
    }
    if (options.random_masses) {
      double sum = 0.0;
      for (int j = 0; j < size; ++j) {
        m.masses.push_back(weight(rng));
        sum += m.masses.back();
      }
      for (double& v : m.masses) v /= sum;
    } else {
      m.masses.assign(static_cast<std::size_t>(size), 1.0 / static_cast<double>(size));
    }
    inst.measures.push_back(std::move(m));
  }
  inst.lambdas.assign(options.sizes.size(), 1.0 / static_cast<double>(options.sizes.size()));
  return inst;
}

}  // namespace wbary::io
