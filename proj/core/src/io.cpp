#include "colent/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "colent/errors.hpp"
#include "json.hpp"

namespace colent {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw StructuralError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": malformed JSON");
  }
}

template <typename T>
T field(const json& doc, const char* key, const std::string& source) {
  if (!doc.contains(key)) throw StructuralError(source + ": missing field '" + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw StructuralError(source + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T optional_field(const json& doc, const char* key, T fallback, const std::string& source) {
  if (!doc.contains(key)) return fallback;
  return field<T>(doc, key, source);
}

std::vector<FunctionSample> samples(const json& doc, const char* key, std::size_t cells,
                                    const std::string& source) {
  std::vector<FunctionSample> out;
  if (!doc.contains(key)) return out;
  auto rows = field<std::vector<std::vector<double>>>(doc, key, source);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    FunctionSample f{std::string(key) + std::to_string(i), std::move(rows[i])};
    if (f.values.size() != cells) {
      throw StructuralError(source + ": " + key + "[" + std::to_string(i) + "] has " +
                            std::to_string(f.values.size()) + " values for " +
                            std::to_string(cells) + " cells");
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write " + path);
  out << contents;
  if (!out) throw StructuralError("failed writing " + path);
}

ModelDocument parse_model(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object()) throw StructuralError(source + ": model must be a JSON object");
  if (optional_field<int>(doc, "version", 1, source) != 1) {
    throw StructuralError(source + ": unsupported model version");
  }
  const auto cells = field<std::size_t>(doc, "cells", source);
  const auto dimension = optional_field<std::size_t>(doc, "dimension", 0, source);
  const auto edges = optional_field<std::vector<std::pair<CellId, CellId>>>(
      doc, "adjacency", {}, source);
  auto space = std::make_shared<const CellSpace>(cells, edges, dimension);
  const auto cover_sets = field<std::vector<std::vector<CellId>>>(doc, "cover", source);
  Cover cover(space, cover_sets);

  const bool invertible = optional_field<bool>(doc, "invertible", false, source);
  std::vector<std::vector<CellId>> images(cells);
  if (doc.contains("map")) {
    const auto& map = doc.at("map");
    if (!map.is_object()) throw StructuralError(source + ": field 'map' must be an object");
    for (auto it = map.begin(); it != map.end(); ++it) {
      std::size_t c = 0;
      try {
        std::size_t used = 0;
        c = std::stoul(it.key(), &used);
        if (used != it.key().size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw StructuralError(source + ": map key '" + it.key() + "' is not a cell index");
      }
      if (c >= cells) throw StructuralError(source + ": map key " + it.key() + " out of range");
      try {
        images[c] = it.value().get<std::vector<CellId>>();
      } catch (const json::exception&) {
        throw StructuralError(source + ": map[" + it.key() + "] must be a list of cells");
      }
    }
    for (std::size_t c = 0; c < cells; ++c) {
      if (images[c].empty()) {
        throw StructuralError(source + ": map has no image for cell " + std::to_string(c));
      }
      std::sort(images[c].begin(), images[c].end());
      images[c].erase(std::unique(images[c].begin(), images[c].end()), images[c].end());
    }
  } else {
    for (std::size_t c = 0; c < cells; ++c) images[c] = {static_cast<CellId>(c)};
  }
  CellMap map(space, images, invertible || !doc.contains("map"));

  ModelDocument out{ModelBundle{space, std::move(cover), std::move(map), std::nullopt}, {}, {}};
  if (doc.contains("depth")) out.bundle.truncation_depth = field<std::size_t>(doc, "depth", source);
  out.vectors = samples(doc, "vectors", cells, source);
  out.functions = samples(doc, "functions", cells, source);
  return out;
}

ModelDocument load_model(const std::string& path) { return parse_model(read_file(path), path); }

std::string model_to_json(const ModelBundle& bundle) {
  json doc;
  doc["version"] = 1;
  doc["cells"] = bundle.space->size();
  doc["dimension"] = bundle.space->dimension();
  json edges = json::array();
  for (auto [i, j] : bundle.space->edges()) edges.push_back({i, j});
  doc["adjacency"] = edges;
  doc["cover"] = bundle.cover.to_vectors();
  json map = json::object();
  for (CellId c = 0; c < bundle.space->size(); ++c) {
    auto img = bundle.map.images(c);
    map[std::to_string(c)] = std::vector<CellId>(img.begin(), img.end());
  }
  doc["map"] = map;
  doc["invertible"] = bundle.map.invertible();
  if (bundle.truncation_depth) doc["depth"] = *bundle.truncation_depth;
  return doc.dump(2) + "\n";
}

TransferMatrix parse_matrix(const std::string& text, const std::string& source) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json doc = parse_json(text, source);
    const auto rows = field<std::vector<std::vector<int>>>(doc, "matrix", source);
    if (doc.contains("alphabet") && field<std::size_t>(doc, "alphabet", source) != rows.size()) {
      throw StructuralError(source + ": 'alphabet' does not match the matrix size");
    }
    return TransferMatrix(rows);
  }
  std::vector<std::vector<int>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<int> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      const std::string v = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
      if (v != "0" && v != "1") {
        throw StructuralError(source + ":" + std::to_string(number) + ": entry '" + v +
                              "' is not 0 or 1");
      }
      row.push_back(v == "1");
    }
    rows.push_back(std::move(row));
  }
  return TransferMatrix(rows);
}

TransferMatrix load_matrix(const std::string& path) { return parse_matrix(read_file(path), path); }

std::string matrix_to_json(const TransferMatrix& matrix) {
  json doc;
  doc["alphabet"] = matrix.alphabet();
  doc["matrix"] = matrix.rows();
  return doc.dump() + "\n";
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

std::string series_csv(const std::vector<ExperimentResult>& results, const std::string& label) {
  std::string out = "label,n,count,exact,mode\n";
  for (const auto& r : results) {
    for (const auto& p : r.series.points) {
      out += label + "," + std::to_string(p.n) + "," + std::to_string(p.count) + "," +
             (p.exact ? "true" : "false") + "," + mode_name(r.mode) + "\n";
    }
  }
  return out;
}

std::string audit_csv(const std::vector<AuditRow>& rows) {
  std::string out = "n,rank,approx_error,mult_defect,trace_defect\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.rank) + "," +
           format_number(r.approx_error) + "," + format_number(r.mult_defect) + "," +
           format_number(r.trace_defect) + "\n";
  }
  return out;
}

}  // namespace colent
