#include "slabsn/problem_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "slabsn/error.hpp"

namespace slabsn {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Parse, "field '" + path + "': " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  return v.get<double>();
}

std::vector<double> as_vector(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::vector<double>> as_table(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_vector(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

BoundaryCondition parse_bc(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "vacuum") return BoundaryCondition::vacuum();
    if (s == "reflective") return BoundaryCondition::reflective();
    field_error(path, "unknown boundary '" + s + "' (vacuum, reflective or {\"incoming\": [...]})");
  }
  if (v.is_object()) {
    return BoundaryCondition::inflow(as_vector(require(v, "incoming", path), path + ".incoming"));
  }
  field_error(path, "expected a string or an object");
}

json bc_to_json(const BoundaryCondition& bc) {
  switch (bc.kind) {
    case BoundaryCondition::Kind::vacuum: return "vacuum";
    case BoundaryCondition::Kind::reflective: return "reflective";
    case BoundaryCondition::Kind::incoming: return json{{"incoming", bc.incoming}};
  }
  return "vacuum";
}

template <typename Enum>
Enum parse_enum(const json& v, const std::string& path,
                std::initializer_list<std::pair<const char*, Enum>> options) {
  if (!v.is_string()) field_error(path, "expected a string");
  const auto s = v.get<std::string>();
  std::string names;
  for (const auto& [name, value] : options) {
    if (s == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  field_error(path, "unknown value '" + s + "' (expected one of: " + names + ")");
}

MaterialXS parse_material(const std::string& name, const json& v, const std::string& path) {
  MaterialXS m;
  m.name = name;
  m.sigma_t = as_vector(require(v, "sigma_t", path), path + ".sigma_t");
  m.sigma_s = as_table(require(v, "sigma_s", path), path + ".sigma_s");
  m.nu_sigma_f = as_vector(require(v, "nu_sigma_f", path), path + ".nu_sigma_f");
  m.chi = as_vector(require(v, "chi", path), path + ".chi");
  if (auto it = v.find("scattering_kernel"); it != v.end()) {
    const auto rows = as_table(*it, path + ".scattering_kernel");
    Eigen::MatrixXd k(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) {
        field_error(path + ".scattering_kernel", "must be a square table");
      }
      for (std::size_t j = 0; j < rows.size(); ++j) {
        k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    m.scattering_kernel = std::move(k);
  }
  return m;
}

Problem from_json(const json& doc) {
  Problem p;
  const json& mats = require(doc, "materials", "");
  if (!mats.is_object() || mats.empty()) field_error("materials", "expected a non-empty object");
  for (const auto& [name, v] : mats.items()) {
    p.materials.push_back(parse_material(name, v, "materials." + name));
  }

  const json& geo = require(doc, "geometry", "");
  p.geometry.edges = as_vector(require(geo, "edges", "geometry"), "geometry.edges");
  const json& regions = require(geo, "regions", "geometry");
  if (!regions.is_array()) field_error("geometry.regions", "expected an array of material names");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string path = "geometry.regions[" + std::to_string(i) + "]";
    if (!regions[i].is_string()) field_error(path, "expected a material name");
    const auto name = regions[i].get<std::string>();
    std::size_t id = p.materials.size();
    for (std::size_t k = 0; k < p.materials.size(); ++k) {
      if (p.materials[k].name == name) id = k;
    }
    if (id == p.materials.size()) field_error(path, "unknown material '" + name + "'");
    p.geometry.region_material.push_back(id);
  }
  p.geometry.left = geo.contains("bc_left") ? parse_bc(geo["bc_left"], "geometry.bc_left")
                                            : BoundaryCondition::vacuum();
  p.geometry.right = geo.contains("bc_right") ? parse_bc(geo["bc_right"], "geometry.bc_right")
                                              : BoundaryCondition::vacuum();

  auto& c = p.config;
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (!s.is_object()) field_error("solver", "expected an object");
    auto integer = [&](const char* key, auto& out) {
      if (!s.contains(key)) return;
      const auto& v = s[key];
      if (!v.is_number_integer()) field_error(std::string("solver.") + key, "expected an integer");
      if (v.get<long long>() < 0) field_error(std::string("solver.") + key, "must be >= 0");
      out = static_cast<std::remove_reference_t<decltype(out)>>(v.get<long long>());
    };
    integer("sn_order", c.sn_order);
    integer("mesh_cells", c.mesh_cells);
    integer("max_outer", c.max_outer);
    integer("max_inner", c.max_inner);
    if (s.contains("tolerance")) c.tolerance = as_number(s["tolerance"], "solver.tolerance");
    if (s.contains("ke") && !s["ke"].is_null()) c.ke = as_number(s["ke"], "solver.ke");
    if (s.contains("solver_kind")) {
      c.solver = parse_enum<SolverKind>(s["solver_kind"], "solver.solver_kind",
                                        {{"analytic", SolverKind::analytic},
                                         {"sweep", SolverKind::sweep}});
    }
    if (s.contains("normalization")) {
      c.normalization = parse_enum<Normalization>(
          s["normalization"], "solver.normalization",
          {{"total_scalar_flux_one", Normalization::total_scalar_flux_one},
           {"none", Normalization::none}});
    }
    if (s.contains("initial_source")) {
      c.initial_source = parse_enum<InitialSource>(
          s["initial_source"], "solver.initial_source",
          {{"abs_x", InitialSource::abs_x}, {"flat", InitialSource::flat}});
    }
    if (s.contains("sweep_scheme")) {
      c.sweep_scheme = parse_enum<SweepScheme>(
          s["sweep_scheme"], "solver.sweep_scheme",
          {{"step", SweepScheme::step}, {"diamond", SweepScheme::diamond}});
    }
  }
  p.validate();
  return p;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Problem parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw Error(ErrorKind::Parse, "syntax error at line " + std::to_string(line) + ", column " +
                                      std::to_string(col) + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  return from_json(doc);
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open problem file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_problem(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string serialize_problem(const Problem& p) {
  json doc;
  json geo;
  geo["edges"] = p.geometry.edges;
  json regions = json::array();
  for (std::size_t id : p.geometry.region_material) regions.push_back(p.materials[id].name);
  geo["regions"] = regions;
  geo["bc_left"] = bc_to_json(p.geometry.left);
  geo["bc_right"] = bc_to_json(p.geometry.right);
  doc["geometry"] = geo;

  json mats = json::object();
  for (const auto& m : p.materials) {
    json jm;
    jm["sigma_t"] = m.sigma_t;
    jm["sigma_s"] = m.sigma_s;
    jm["nu_sigma_f"] = m.nu_sigma_f;
    jm["chi"] = m.chi;
    if (m.scattering_kernel) {
      const auto& k = *m.scattering_kernel;
      json rows = json::array();
      for (Eigen::Index i = 0; i < k.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < k.cols(); ++j) row.push_back(k(i, j));
        rows.push_back(row);
      }
      jm["scattering_kernel"] = rows;
    }
    mats[m.name] = jm;
  }
  doc["materials"] = mats;

  const auto& c = p.config;
  json s;
  s["sn_order"] = c.sn_order;
  s["mesh_cells"] = c.mesh_cells;
  s["tolerance"] = c.tolerance;
  s["max_outer"] = c.max_outer;
  s["max_inner"] = c.max_inner;
  s["ke"] = c.ke ? json(*c.ke) : json(nullptr);
  s["solver_kind"] = to_string(c.solver);
  s["normalization"] =
      c.normalization == Normalization::none ? "none" : "total_scalar_flux_one";
  s["initial_source"] = c.initial_source == InitialSource::flat ? "flat" : "abs_x";
  s["sweep_scheme"] = c.sweep_scheme == SweepScheme::diamond ? "diamond" : "step";
  doc["solver"] = s;
  return doc.dump(2) + "\n";
}

}  // namespace slabsn
