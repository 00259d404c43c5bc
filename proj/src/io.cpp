#include "mmconc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

namespace mmconc {

namespace {

[[noreturn]] void schema_error(const std::string& source, const std::string& pointer, const std::string& what) {
  throw InputError(source + ": " + (pointer.empty() ? "/" : pointer) + ": " + what);
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": malformed JSON");
  }
}

double as_number(const Json& j, const std::string& source, const std::string& pointer) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  schema_error(source, pointer, "expected a number");
}

std::size_t as_size(const Json& j, const std::string& source, const std::string& pointer) {
  if (!j.is_number_unsigned()) schema_error(source, pointer, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

bool as_bool(const Json& j, const std::string& source, const std::string& pointer) {
  if (!j.is_boolean()) schema_error(source, pointer, "expected true or false");
  return j.get<bool>();
}

const Json::array_t& as_array(const Json& j, const std::string& source, const std::string& pointer) {
  if (!j.is_array()) schema_error(source, pointer, "expected an array");
  return j.get_ref<const Json::array_t&>();
}

FamilySpec generator_from_string(const std::string& text, const std::string& source, const std::string& pointer) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) schema_error(source, pointer, "generator string must look like kind:n");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  FamilySpec spec;
  try {
    spec.kind = parse_family_kind(trim(text.substr(0, colon)));
    spec.n = std::stoul(trim(text.substr(colon + 1)));
  } catch (const std::exception&) {
    schema_error(source, pointer, "bad generator '" + text + "'");
  }
  return spec;
}

FamilySpec generator_from_json(const Json& j, const std::string& source, const std::string& pointer) {
  if (j.is_string()) return generator_from_string(j.get<std::string>(), source, pointer);
  if (!j.is_object()) schema_error(source, pointer, "expected a generator object or string");
  FamilySpec spec;
  if (!j.contains("kind") || !j["kind"].is_string()) schema_error(source, pointer + "/kind", "expected a string");
  try {
    spec.kind = parse_family_kind(j["kind"].get<std::string>());
  } catch (const InputError& e) {
    schema_error(source, pointer + "/kind", e.what());
  }
  if (j.contains("n")) spec.n = as_size(j["n"], source, pointer + "/n");
  if (j.contains("normalize")) spec.normalize = as_bool(j["normalize"], source, pointer + "/normalize");
  if (j.contains("edges")) {
    const auto& edges = as_array(j["edges"], source, pointer + "/edges");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::string at = pointer + "/edges/" + std::to_string(e);
      const auto& edge = as_array(edges[e], source, at);
      if (edge.size() != 2 && edge.size() != 3) schema_error(source, at, "expected [a, b] or [a, b, length]");
      WeightedEdge w;
      w.a = as_size(edge[0], source, at + "/0");
      w.b = as_size(edge[1], source, at + "/1");
      if (edge.size() == 3) w.length = as_number(edge[2], source, at + "/2");
      spec.edges.push_back(w);
    }
  }
  if (j.contains("factors")) {
    const auto& factors = as_array(j["factors"], source, pointer + "/factors");
    for (std::size_t f = 0; f < factors.size(); ++f) {
      spec.factors.push_back(generator_from_json(factors[f], source, pointer + "/factors/" + std::to_string(f)));
    }
  }
  if (j.contains("path")) {
    if (!j["path"].is_string()) schema_error(source, pointer + "/path", "expected a string");
    spec.path = j["path"].get<std::string>();
  }
  return spec;
}

std::vector<std::vector<double>> matrix_from_json(const Json& j, const std::string& source,
                                                  const std::string& pointer) {
  const auto& rows = as_array(j, source, pointer);
  std::vector<std::vector<double>> dist;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string at = pointer + "/" + std::to_string(r);
    const auto& row = as_array(rows[r], source, at);
    std::vector<double> values;
    for (std::size_t c = 0; c < row.size(); ++c) values.push_back(as_number(row[c], source, at + "/" + std::to_string(c)));
    dist.push_back(std::move(values));
  }
  return dist;
}

std::vector<std::vector<double>> euclidean_from_json(const Json& j, const std::string& source,
                                                     const std::string& pointer) {
  const auto& coords = as_array(j, source, pointer);
  std::vector<std::vector<double>> points;
  for (std::size_t p = 0; p < coords.size(); ++p) {
    const std::string at = pointer + "/" + std::to_string(p);
    const auto& xs = as_array(coords[p], source, at);
    std::vector<double> point;
    for (std::size_t c = 0; c < xs.size(); ++c) point.push_back(as_number(xs[c], source, at + "/" + std::to_string(c)));
    if (!points.empty() && point.size() != points.front().size()) schema_error(source, at, "dimension mismatch");
    points.push_back(std::move(point));
  }
  std::vector<std::vector<double>> dist(points.size(), std::vector<double>(points.size(), 0.0));
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = 0; b < points.size(); ++b) {
      double sum = 0.0;
      for (std::size_t c = 0; c < points[a].size(); ++c) sum += (points[a][c] - points[b][c]) * (points[a][c] - points[b][c]);
      dist[a][b] = std::sqrt(sum);
    }
  }
  return dist;
}

std::string csv_cell(const Json& cell) {
  if (cell.is_null()) return "";
  if (cell.is_string()) {
    const auto& s = cell.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  return cell.dump();
}

Json profile_json(const DoublingProfile& profile) {
  Json j;
  j["horizon"] = number(profile.horizon());
  Json radii = Json::array();
  Json constants = Json::array();
  for (double r : profile.radii()) radii.push_back(number(r));
  for (double c : profile.constants()) constants.push_back(number(c));
  j["radii"] = std::move(radii);
  j["constants"] = std::move(constants);
  j["sup"] = number(profile.sup());
  return j;
}

Json witnesses_json(const std::vector<std::string>& labels, const SepResult& result) {
  Json out = Json::array();
  for (const auto& w : result.witnesses) {
    Json group = Json::array();
    for (std::size_t i : w) group.push_back(labels[i]);
    out.push_back(std::move(group));
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

SpaceDocument parse_space_document(const std::string& text, const std::string& source) {
  const Json doc = parse_json(text, source);
  if (!doc.is_object()) schema_error(source, "", "expected an object");
  if (!doc.contains("schema_version")) schema_error(source, "/schema_version", "missing");
  if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion) {
    schema_error(source, "/schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  for (const auto& [key, value] : doc.items()) {
    static const char* known[] = {"schema_version", "points", "metric", "weights", "merge_duplicates",
                                  "allow_zero_mass", "screen", "description"};
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      schema_error(source, "/" + key, "unknown field");
    }
  }

  SpaceDocument out;
  if (doc.contains("merge_duplicates")) out.merge_duplicates = as_bool(doc["merge_duplicates"], source, "/merge_duplicates");
  if (doc.contains("allow_zero_mass")) out.raw.allow_zero_mass = as_bool(doc["allow_zero_mass"], source, "/allow_zero_mass");
  if (doc.contains("screen")) {
    if (!doc["screen"].is_object()) schema_error(source, "/screen", "expected an object");
    out.screen = doc["screen"];
  }

  std::optional<std::vector<std::string>> labels;
  std::optional<std::size_t> count;
  if (doc.contains("points")) {
    const Json& points = doc["points"];
    if (points.is_number_unsigned()) {
      count = points.get<std::size_t>();
    } else {
      const auto& list = as_array(points, source, "/points");
      labels.emplace();
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].is_string()) {
          labels->push_back(list[i].get<std::string>());
        } else if (list[i].is_number_integer()) {
          labels->push_back(list[i].dump());
        } else {
          schema_error(source, "/points/" + std::to_string(i), "expected a label string");
        }
      }
      count = labels->size();
    }
  }

  if (!doc.contains("metric")) {
    // A lone point needs no metric.
    if (count && *count == 1) {
      out.raw.dist = {{0.0}};
    } else {
      schema_error(source, "/metric", "missing");
    }
  } else {
    const Json& metric = doc["metric"];
    if (metric.is_string()) {
      out.generated = generate(generator_from_json(metric, source, "/metric"));
    } else if (metric.is_object() && metric.contains("generator")) {
      out.generated = generate(generator_from_json(metric["generator"], source, "/metric/generator"));
    } else if (metric.is_object() && metric.contains("matrix")) {
      out.raw.dist = matrix_from_json(metric["matrix"], source, "/metric/matrix");
    } else if (metric.is_object() && metric.contains("euclidean")) {
      out.raw.dist = euclidean_from_json(metric["euclidean"], source, "/metric/euclidean");
    } else {
      schema_error(source, "/metric", "expected \"matrix\", \"euclidean\", \"generator\" or a generator string");
    }
  }

  if (out.generated) {
    RawSpace raw = out.generated->to_raw();
    raw.allow_zero_mass = out.raw.allow_zero_mass;
    out.raw = std::move(raw);
  }
  const std::size_t n = out.raw.dist.size();
  if (count && *count != n) {
    schema_error(source, "/points", std::to_string(*count) + " points but the metric has " + std::to_string(n));
  }
  if (labels) {
    out.raw.labels = *labels;
  } else if (!out.generated) {
    out.raw.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.raw.labels[i] = std::to_string(i);
  }

  if (!doc.contains("weights") || (doc["weights"].is_string() && doc["weights"].get<std::string>() == "uniform")) {
    out.raw.weights.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  } else {
    const auto& weights = as_array(doc["weights"], source, "/weights");
    out.raw.weights.clear();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      out.raw.weights.push_back(as_number(weights[i], source, "/weights/" + std::to_string(i)));
    }
  }
  if (out.generated) {
    if (out.raw.weights.size() != n) {
      schema_error(source, "/weights", std::to_string(out.raw.weights.size()) + " weights for " + std::to_string(n) + " points");
    }
    bool usable = true;
    for (double w : out.raw.weights) usable = usable && std::isfinite(w) && w >= 0.0;
    if (!usable) {
      // Leave the bad weights to validation, which names them.
      out.generated.reset();
    } else {
      std::vector<double> flat;
      flat.reserve(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) flat.push_back(out.generated->distance(i, j));
      }
      out.generated = FiniteMMSpace::from_metric_unchecked(out.raw.labels, std::move(flat), out.raw.weights,
                                                           out.raw.allow_zero_mass);
    }
  }
  return out;
}

FiniteMMSpace parse_space(const std::string& text, const std::string& source) {
  SpaceDocument doc = parse_space_document(text, source);
  if (doc.generated && !doc.merge_duplicates) return std::move(*doc.generated);
  try {
    if (doc.merge_duplicates) return make_space(merge_duplicates(doc.raw).space);
    return make_space(doc.raw);
  } catch (const ValidationError& e) {
    throw InputError(source + ": " + e.what());
  }
}

FiniteMMSpace load_space(const std::string& path) { return parse_space(read_text_file(path), path); }

std::string serialize_space(const FiniteMMSpace& space) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["points"] = space.labels();
  Json matrix = Json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < space.size(); ++j) row.push_back(space.distance(i, j));
    matrix.push_back(std::move(row));
  }
  doc["metric"] = Json{{"matrix", std::move(matrix)}};
  doc["weights"] = std::vector<double>(space.weights().begin(), space.weights().end());
  bool zero = false;
  for (double w : space.weights()) zero = zero || w == 0.0;
  if (zero) doc["allow_zero_mass"] = true;
  return doc.dump(2) + "\n";
}

bool is_real_measure_document(const std::string& text) {
  try {
    const Json doc = Json::parse(text);
    return doc.is_object() && doc.contains("atoms");
  } catch (const Json::exception&) {
    return false;
  }
}

RealMeasure parse_real_measure(const std::string& text, const std::string& source) {
  const Json doc = parse_json(text, source);
  if (!doc.is_object()) schema_error(source, "", "expected an object");
  if (doc.contains("schema_version") &&
      (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion)) {
    schema_error(source, "/schema_version", "unsupported version");
  }
  if (!doc.contains("atoms")) schema_error(source, "/atoms", "missing");
  const auto& list = as_array(doc["atoms"], source, "/atoms");
  std::vector<RealMeasure::Atom> atoms;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = "/atoms/" + std::to_string(i);
    if (list[i].is_array()) {
      const auto& pair = list[i].get_ref<const Json::array_t&>();
      if (pair.size() != 2) schema_error(source, at, "expected [position, weight]");
      atoms.push_back({as_number(pair[0], source, at + "/0"), as_number(pair[1], source, at + "/1")});
    } else if (list[i].is_object() && list[i].contains("position") && list[i].contains("weight")) {
      atoms.push_back({as_number(list[i]["position"], source, at + "/position"),
                       as_number(list[i]["weight"], source, at + "/weight")});
    } else {
      schema_error(source, at, "expected [position, weight] or {\"position\", \"weight\"}");
    }
  }
  try {
    return RealMeasure::from_pairs(std::move(atoms));
  } catch (const InputError& e) {
    schema_error(source, "/atoms", e.what());
  }
}

Json number(double value) {
  if (std::isfinite(value)) return value;
  return value > 0 ? "inf" : "-inf";
}

std::string format_number(double value) {
  if (std::isfinite(value)) return Json(value).dump();
  return value > 0 ? "inf" : "-inf";
}

Json labels_of(const FiniteMMSpace& space, const PointSet& set) {
  Json out = Json::array();
  for (std::size_t i : set) out.push_back(space.label(i));
  return out;
}

std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<Json>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + csv_cell(header[c]);
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_cell(row[c]);
    out += "\n";
  }
  return out;
}

Json levy_report_json(const LevyReport& report) {
  Json j;
  Json kappas = Json::array();
  for (double k : report.kappas) kappas.push_back(number(k));
  j["kappas"] = std::move(kappas);
  j["horizon"] = number(report.horizon);
  j["epsilon"] = number(report.epsilon);
  j["seed"] = report.seed;
  j["supremum_scope"] = "over roster";

  Json roster = Json::array();
  for (const auto& entry : report.roster) {
    Json e;
    e["name"] = entry.name;
    e["points"] = entry.points;
    e["diameter"] = number(entry.diameter);
    e["profile"] = entry.profile ? profile_json(*entry.profile) : Json();
    e["status"] = entry.status.empty() ? "ok" : entry.status;
    roster.push_back(std::move(e));
  }
  j["roster"] = std::move(roster);
  j["envelope"] = report.envelope ? profile_json(*report.envelope) : Json();

  Json rows = Json::array();
  for (const auto& row : report.rows) {
    const auto& screen_labels = [&](const std::string& name) -> const std::vector<std::string>& {
      for (const auto& entry : report.roster) {
        if (entry.name == name) return entry.labels;
      }
      throw InputError("report cell names unknown screen '" + name + "'");
    };
    Json r;
    r["family"] = row.family;
    r["n"] = row.n;
    r["points"] = row.points;
    r["mass"] = number(row.mass);
    Json sep = Json::array();
    for (const auto& cell : row.sep) {
      Json c;
      c["kappa"] = number(cell.kappa);
      c["lower"] = number(cell.lower.value);
      c["lower_feasible"] = cell.lower.feasible;
      c["lower_witnesses"] = witnesses_json(row.labels, cell.lower);
      if (cell.exact) {
        c["exact"] = number(cell.exact->value);
        c["exact_feasible"] = cell.exact->feasible;
        c["exact_witnesses"] = witnesses_json(row.labels, *cell.exact);
      } else {
        c["exact"] = Json();
      }
      sep.push_back(std::move(c));
    }
    r["sep"] = std::move(sep);
    Json cells = Json::array();
    for (const auto& cell : row.cells) {
      Json c;
      c["screen"] = cell.screen;
      c["kappa"] = number(cell.kappa);
      c["ok"] = cell.ok;
      if (!cell.ok) {
        c["error"] = cell.error;
        cells.push_back(std::move(c));
        continue;
      }
      c["lower"] = number(cell.bracket.lower);
      c["upper"] = number(cell.bracket.upper);
      c["upper_source"] = cell.bracket.upper_source;
      c["starved"] = cell.starved;
      if (const auto* map = std::get_if<ScreenMap>(&cell.bracket.witness)) {
        Json targets = Json::array();
        const auto& labels = screen_labels(cell.screen);
        for (std::size_t t : map->targets) targets.push_back(labels[t]);
        c["witness_map"] = std::move(targets);
      }
      if (cell.witness) {
        c["concentration"] = Json{{"center", cell.witness->center},
                                  {"core_mass", number(cell.witness->core_mass)},
                                  {"ball_mass", number(cell.witness->ball_mass)},
                                  {"residual", number(cell.witness->residual)},
                                  {"ball_diameter", number(cell.witness->ball_diameter)}};
      } else {
        c["concentration"] = Json();
      }
      c["diagnostics"] = cell.bracket.diagnostics;
      cells.push_back(std::move(c));
    }
    r["screens"] = std::move(cells);
    Json sup = Json::array();
    for (double s : row.roster_sup) sup.push_back(number(s));
    r["roster_sup"] = std::move(sup);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string levy_report_csv(const LevyReport& report) {
  const std::vector<std::string> header{"family", "n", "points", "screen", "kappa", "ok", "sep_lower", "sep_exact",
                                        "obsdiam_lower", "obsdiam_upper", "roster_sup", "witness_residual",
                                        "starved"};
  std::vector<std::vector<Json>> rows;
  for (const auto& row : report.rows) {
    const std::size_t kappas = report.kappas.size();
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      const auto& cell = row.cells[c];
      const std::size_t k = c % kappas;
      const auto& sep = row.sep[k];
      rows.push_back({row.family, row.n, row.points, cell.screen, number(cell.kappa), cell.ok,
                      number(sep.lower.value), sep.exact ? number(sep.exact->value) : Json(),
                      cell.ok ? number(cell.bracket.lower) : Json(), cell.ok ? number(cell.bracket.upper) : Json(),
                      number(row.roster_sup[k]), cell.witness ? number(cell.witness->residual) : Json(),
                      cell.starved});
    }
  }
  return table_csv(header, rows);
}

}  // namespace mmconc
