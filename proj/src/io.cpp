#include "fiberot/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fiberot/error.hpp"

namespace fiberot {

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where, "expected a number");
  return j.get<double>();
}

int index_at(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) parse_fail(where, "expected an integer index");
  return j.get<int>();
}

const Json& array_at(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where, "expected an array");
  return j;
}

const Json& object_at(const Json& j, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  return j;
}

std::vector<std::vector<double>> matrix_at(const Json& j, const std::string& where) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < array_at(j, where).size(); ++i) {
    const std::string row = where + "[" + std::to_string(i) + "]";
    std::vector<double> r;
    for (std::size_t c = 0; c < array_at(j[i], row).size(); ++c) {
      r.push_back(number_at(j[i][c], row + "[" + std::to_string(c) + "]"));
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Coordinates when the points are numbers or numeric arrays; empty for labels.
std::vector<std::vector<double>> coords_at(const Json& j, const std::string& where) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < array_at(j, where).size(); ++i) {
    const auto& pt = j[i];
    if (pt.is_number()) {
      out.push_back({pt.get<double>()});
    } else if (pt.is_array()) {
      out.push_back({});
      for (std::size_t c = 0; c < pt.size(); ++c) {
        out.back().push_back(
            number_at(pt[c], where + "[" + std::to_string(i) + "][" + std::to_string(c) + "]"));
      }
    } else {
      return {};
    }
  }
  return out;
}

std::size_t point_count(const Json& j) { return j.is_array() ? j.size() : 0; }

GroundCost cost_from(const Json& holder, const std::string& where,
                     std::vector<std::vector<double>>& coords) {
  coords.clear();
  if (holder.contains("points")) coords = coords_at(holder["points"], where + ".points");
  if (holder.contains("cost")) {
    GroundCost cost(matrix_at(holder["cost"], where + ".cost"));
    if (holder.contains("points") && point_count(holder["points"]) != cost.size()) {
      parse_fail(where, "points and cost differ in size");
    }
    return cost;
  }
  if (coords.empty()) parse_fail(where, "needs \"cost\" or numeric \"points\"");
  return GroundCost::euclidean(coords);
}

DiscreteMeasure atoms_from(const Json& j, const std::string& where) {
  std::vector<Atom> atoms;
  for (std::size_t a = 0; a < array_at(j, where).size(); ++a) {
    const std::string at = where + "[" + std::to_string(a) + "]";
    const auto& atom = object_at(j[a], at);
    if (!atom.contains("point")) parse_fail(at, "missing \"point\"");
    if (!atom.contains("w")) parse_fail(at, "missing \"w\"");
    atoms.push_back({index_at(atom["point"], at + ".point"), number_at(atom["w"], at + ".w")});
  }
  try {
    return normalize_measure(atoms);
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.what());
  }
}

std::vector<int> indices_from(const Json& j, const std::string& where) {
  std::vector<int> out;
  for (std::size_t i = 0; i < array_at(j, where).size(); ++i) {
    out.push_back(index_at(j[i], where + "[" + std::to_string(i) + "]"));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

const FiberedMeasure& Instance::measure(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error(ErrorCode::InvalidProblem, "no measure named '" + name + "'");
  }
  return measures[it - names.begin()];
}

std::vector<FiberedMeasure> Instance::select(const std::vector<std::string>& wanted) const {
  if (wanted.empty()) return measures;
  std::vector<FiberedMeasure> out;
  for (const auto& name : wanted) out.push_back(measure(name));
  return out;
}

Instance parse_instance(const Json& doc) {
  object_at(doc, "$");
  std::vector<std::string> ids;
  std::vector<double> sigma;
  if (doc.contains("base")) {
    const auto& base = array_at(doc["base"], "base");
    for (std::size_t i = 0; i < base.size(); ++i) {
      const std::string at = "base[" + std::to_string(i) + "]";
      object_at(base[i], at);
      if (!base[i].contains("id") || !base[i]["id"].is_string()) {
        parse_fail(at, "missing string \"id\"");
      }
      ids.push_back(base[i]["id"].get<std::string>());
      sigma.push_back(base[i].contains("sigma") ? number_at(base[i]["sigma"], at + ".sigma")
                                                : 1.0);
    }
    if (ids.empty()) parse_fail("base", "no base points");
  } else {
    ids = {"*"};
    sigma = {1.0};
  }
  {
    std::set<std::string> seen(ids.begin(), ids.end());
    if (seen.size() != ids.size()) parse_fail("base", "duplicate base id");
  }
  const std::size_t bases = ids.size();
  const Json empty_object = Json::object();
  const Json& fibers = doc.contains("fibers") ? object_at(doc["fibers"], "fibers") : empty_object;
  for (const auto& [key, _] : fibers.items()) {
    if (std::find(ids.begin(), ids.end(), key) == ids.end()) {
      parse_fail("fibers." + key, "unknown base id");
    }
  }

  Instance inst;
  const bool shared = doc.contains("cost") || doc.contains("points");
  if (shared) {
    std::vector<std::vector<double>> coords;
    GroundCost cost = cost_from(doc, "$", coords);
    std::map<std::string, std::vector<int>> relabelings;
    if (doc.contains("relabelings")) {
      for (const auto& [key, perm] : object_at(doc["relabelings"], "relabelings").items()) {
        const std::string at = "relabelings." + key;
        std::vector<int> p;
        for (std::size_t i = 0; i < array_at(perm, at).size(); ++i) {
          p.push_back(index_at(perm[i], at + "[" + std::to_string(i) + "]"));
        }
        relabelings[key] = std::move(p);
      }
    }
    inst.bundle = Bundle::shared(ids, std::move(cost), relabelings, std::move(coords));
  } else {
    if (doc.contains("relabelings")) {
      parse_fail("relabelings", "only allowed with a shared fiber");
    }
    std::vector<GroundCost> costs;
    std::vector<std::vector<std::vector<double>>> coords;
    for (const auto& id : ids) {
      const std::string at = "fibers." + id;
      if (!fibers.contains(id)) parse_fail(at, "missing fiber");
      std::vector<std::vector<double>> c;
      costs.push_back(cost_from(object_at(fibers[id], at), at, c));
      coords.push_back(std::move(c));
    }
    inst.bundle = Bundle::per_fiber(ids, std::move(costs), std::move(coords));
  }

  std::map<std::string, std::vector<std::optional<DiscreteMeasure>>> found;
  const auto add = [&](const std::string& name, std::size_t b, const Json& atoms,
                       const std::string& at) {
    if (!found.count(name)) {
      inst.names.push_back(name);
      found[name].resize(bases);
    }
    if (found[name][b]) parse_fail(at, "measure given twice for this base point");
    found[name][b] = atoms_from(atoms, at);
  };
  for (std::size_t b = 0; b < bases; ++b) {
    const std::string at = "fibers." + ids[b] + ".measures";
    if (fibers.contains(ids[b]) && fibers[ids[b]].contains("measures")) {
      for (const auto& [name, atoms] : object_at(fibers[ids[b]]["measures"], at).items()) {
        add(name, b, atoms, at + "." + name);
      }
    }
  }
  if (doc.contains("measures")) {
    for (const auto& [name, spec] : object_at(doc["measures"], "measures").items()) {
      const std::string at = "measures." + name;
      if (spec.is_array()) {
        if (bases != 1) parse_fail(at, "a bare atom list needs a one-point base");
        add(name, 0, spec, at);
      } else {
        for (const auto& [base, atoms] : object_at(spec, at).items()) {
          const auto it = std::find(ids.begin(), ids.end(), base);
          if (it == ids.end()) parse_fail(at + "." + base, "unknown base id");
          add(name, static_cast<std::size_t>(it - ids.begin()), atoms, at + "." + base);
        }
      }
    }
  }
  for (const auto& name : inst.names) {
    try {
      inst.measures.emplace_back(ids, sigma, found[name]);
    } catch (const Error& e) {
      throw Error(e.code(), "measure '" + name + "': " + e.what());
    }
    require_on_bundle(inst.bundle, inst.measures.back());
  }

  const auto support_for = [](const Json& j, const std::string& at) {
    return indices_from(j, at);
  };
  if (doc.contains("support")) {
    inst.support.resize(bases);
    const auto& s = doc["support"];
    if (s.is_array()) {
      const auto shared_support = support_for(s, "support");
      for (auto& v : inst.support) v = shared_support;
    } else {
      for (const auto& [base, list] : object_at(s, "support").items()) {
        const auto it = std::find(ids.begin(), ids.end(), base);
        if (it == ids.end()) parse_fail("support." + base, "unknown base id");
        inst.support[it - ids.begin()] = support_for(list, "support." + base);
      }
    }
  }
  for (std::size_t b = 0; b < bases; ++b) {
    if (fibers.contains(ids[b]) && fibers[ids[b]].contains("support")) {
      inst.support.resize(bases);
      inst.support[b] = support_for(fibers[ids[b]]["support"], "fibers." + ids[b] + ".support");
    }
  }
  if (!inst.support.empty()) {
    // Unlisted σ-positive fibers default to every point.
    const auto sig = inst.measures.empty() ? std::span<const double>() : inst.measures[0].sigma();
    for (std::size_t b = 0; b < bases; ++b) {
      if (inst.support[b].empty() && !sig.empty() && sig[b] > 0.0) {
        inst.support[b].resize(inst.bundle.cost(b).size());
        for (std::size_t i = 0; i < inst.support[b].size(); ++i) inst.support[b][i] = int(i);
      }
      if (!sig.empty() && sig[b] == 0.0) inst.support[b].clear();
    }
  }

  if (doc.contains("reference")) {
    const auto& r = doc["reference"];
    ReferencePoint ref;
    if (r.is_number_integer()) {
      ref.indices = {r.get<int>()};
    } else {
      ref.indices.assign(bases, 0);
      for (std::size_t b = 0; b < bases; ++b) {
        const std::string at = "reference." + ids[b];
        if (!object_at(r, "reference").contains(ids[b])) parse_fail(at, "missing index");
        ref.indices[b] = index_at(r[ids[b]], at);
      }
    }
    for (std::size_t b = 0; b < bases; ++b) {
      const int y = ref.at(inst.bundle, b);
      if (y < 0 || y >= static_cast<int>(inst.bundle.cost(b).size())) {
        throw Error(ErrorCode::IndexOutOfRange, "reference point out of range");
      }
    }
    inst.reference = std::move(ref);
  }
  return inst;
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return parse_instance(doc);
}

Instance load_csv_instance(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::vector<std::pair<double, double>>> rows(paths.size());
  std::set<double> coords;
  for (std::size_t f = 0; f < paths.size(); ++f) {
    std::ifstream in(paths[f]);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + paths[f].string() + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      const std::string where = paths[f].string() + ":" + std::to_string(line_no);
      if (comma == std::string::npos) parse_fail(where, "expected 'coordinate,weight'");
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      char* end_a = nullptr;
      char* end_b = nullptr;
      const double x = std::strtod(a.c_str(), &end_a);
      const double w = std::strtod(b.c_str(), &end_b);
      const bool numeric = end_a != a.c_str() && *end_a == '\0' && end_b != b.c_str() &&
                           (*end_b == '\0' || *end_b == ' ');
      if (!numeric) {
        if (rows[f].empty() && line_no == 1) continue;  // header
        parse_fail(where, "expected 'coordinate,weight'");
      }
      if (!std::isfinite(x) || !std::isfinite(w)) parse_fail(where, "non-finite value");
      rows[f].push_back({x, w});
      coords.insert(x);
    }
  }
  const std::vector<double> xs(coords.begin(), coords.end());
  Instance inst;
  std::vector<std::vector<double>> pts;
  for (double x : xs) pts.push_back({x});
  inst.bundle = Bundle::single(GroundCost::line(xs), pts);
  for (std::size_t f = 0; f < paths.size(); ++f) {
    std::vector<Atom> atoms;
    for (const auto& [x, w] : rows[f]) {
      const int idx = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
      atoms.push_back({idx, w});
    }
    try {
      inst.measures.push_back(FiberedMeasure::single(normalize_measure(atoms)));
    } catch (const Error& e) {
      throw Error(e.code(), paths[f].string() + ": " + e.what());
    }
    inst.names.push_back(paths[f].stem().string());
  }
  return inst;
}

namespace {

Json atoms_json(const DiscreteMeasure& m) {
  Json out = Json::array();
  for (std::size_t a = 0; a < m.size(); ++a) {
    out.push_back({{"point", m.points()[a]}, {"w", m.weights()[a]}});
  }
  return out;
}

Json points_json(const Bundle& bundle, std::size_t b) {
  const auto& c = bundle.coords(b);
  Json out = Json::array();
  if (c.empty()) {
    for (std::size_t i = 0; i < bundle.cost(b).size(); ++i) out.push_back(i);
  } else {
    for (const auto& pt : c) {
      if (pt.size() == 1) {
        out.push_back(pt[0]);
      } else {
        out.push_back(pt);
      }
    }
  }
  return out;
}

}  // namespace

Json instance_to_json(const Instance& inst) {
  const auto& bundle = inst.bundle;
  const auto& ids = bundle.base_ids();
  Json doc;
  const std::span<const double> sigma =
      inst.measures.empty() ? std::span<const double>() : inst.measures[0].sigma();
  doc["base"] = Json::array();
  for (std::size_t b = 0; b < ids.size(); ++b) {
    doc["base"].push_back({{"id", ids[b]}, {"sigma", sigma.empty() ? 1.0 : sigma[b]}});
  }
  if (bundle.shared_fiber()) {
    doc["points"] = points_json(bundle, 0);
    doc["cost"] = bundle.cost(0).matrix();
    if (bundle.has_relabelings()) {
      doc["relabelings"] = Json::object();
      for (std::size_t b = 0; b < ids.size(); ++b) {
        const auto r = bundle.relabeling(b);
        doc["relabelings"][ids[b]] = std::vector<int>(r.begin(), r.end());
      }
    }
  }
  doc["fibers"] = Json::object();
  for (std::size_t b = 0; b < ids.size(); ++b) {
    Json fiber = Json::object();
    if (!bundle.shared_fiber()) {
      fiber["points"] = points_json(bundle, b);
      fiber["cost"] = bundle.cost(b).matrix();
    }
    fiber["measures"] = Json::object();
    for (std::size_t k = 0; k < inst.measures.size(); ++k) {
      if (const auto* f = inst.measures[k].fiber(b)) {
        fiber["measures"][inst.names[k]] = atoms_json(*f);
      }
    }
    if (!inst.support.empty() && !inst.support[b].empty()) fiber["support"] = inst.support[b];
    doc["fibers"][ids[b]] = std::move(fiber);
  }
  if (inst.reference) {
    if (inst.reference->indices.size() == 1) {
      doc["reference"] = inst.reference->indices[0];
    } else {
      for (std::size_t b = 0; b < ids.size(); ++b) {
        doc["reference"][ids[b]] = inst.reference->indices[b];
      }
    }
  }
  return doc;
}

Json certificate_to_json(const DualCertificate& cert, const BarycenterProblem& problem) {
  Json doc;
  doc["zeta"] = Json::object();
  doc["xi"] = Json::object();
  const auto& ids = problem.bundle.base_ids();
  for (std::size_t k = 0; k < cert.zeta.size(); ++k) {
    const std::string key = std::to_string(k);
    doc["zeta"][key] = Json::object();
    doc["xi"][key] = Json::object();
    for (std::size_t b = 0; b < ids.size(); ++b) {
      if (!problem.active(b)) continue;
      doc["zeta"][key][ids[b]] = cert.zeta[k][b];
      doc["xi"][key][ids[b]] = cert.xi[k][b];
    }
  }
  return doc;
}

DualCertificate certificate_from_json(const Json& doc, const BarycenterProblem& problem) {
  object_at(doc, "$");
  if (!doc.contains("zeta") || !doc.contains("xi")) {
    parse_fail("$", "certificate needs \"zeta\" and \"xi\"");
  }
  DualCertificate cert = zero_certificate(problem);
  const auto& ids = problem.bundle.base_ids();
  for (std::size_t k = 0; k < problem.K(); ++k) {
    const std::string key = std::to_string(k);
    for (std::size_t b = 0; b < ids.size(); ++b) {
      if (!problem.active(b)) continue;
      const std::string zat = "zeta." + key + "." + ids[b];
      const std::string xat = "xi." + key + "." + ids[b];
      const auto& z = object_at(doc["zeta"], "zeta");
      const auto& x = object_at(doc["xi"], "xi");
      if (!z.contains(key) || !object_at(z[key], "zeta." + key).contains(ids[b])) {
        parse_fail(zat, "missing");
      }
      if (!x.contains(key) || !object_at(x[key], "xi." + key).contains(ids[b])) {
        parse_fail(xat, "missing");
      }
      cert.zeta[k][b] = number_at(z[key][ids[b]], zat);
      const auto& values = array_at(x[key][ids[b]], xat);
      cert.xi[k][b].clear();
      for (std::size_t s = 0; s < values.size(); ++s) {
        cert.xi[k][b].push_back(number_at(values[s], xat + "[" + std::to_string(s) + "]"));
      }
    }
  }
  return cert;
}

Json measure_to_json(const FiberedMeasure& m) {
  Json out = Json::object();
  for (std::size_t b = 0; b < m.base_count(); ++b) {
    if (const auto* f = m.fiber(b)) out[m.base_ids()[b]] = atoms_json(*f);
  }
  return out;
}

double round_significant(double v) {
  if (v == 0.0) return 0.0;
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

Json rounded(const Json& doc) {
  if (doc.is_number_float()) {
    const double v = doc.get<double>();
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return round_significant(v);
  }
  if (doc.is_array() || doc.is_object()) {
    Json out = doc;
    for (auto it = out.begin(); it != out.end(); ++it) *it = rounded(*it);
    return out;
  }
  return doc;
}

std::string dump_report(const Json& doc) { return rounded(doc).dump(2) + "\n"; }

}  // namespace fiberot
