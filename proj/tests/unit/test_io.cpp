#include <doctest.h>

#include <functional>
#include <string>

#include "colent/errors.hpp"
#include "colent/io.hpp"

using namespace colent;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const StructuralError& e) {
    return e.what();
  }
  return "";
}

const char* kPath4 = R"({
  "version": 1,
  "cells": 4,
  "dimension": 1,
  "adjacency": [[0, 1], [1, 2], [2, 3]],
  "cover": [[0, 1], [1, 2], [2, 3]],
  "map": {"0": [1], "1": [2], "2": [3], "3": [0]},
  "invertible": true,
  "vectors": [[1, -1, 1, -1]]
})";

}  // namespace

TEST_CASE("models parse and round-trip") {
  const ModelDocument doc = parse_model(kPath4);
  CHECK(doc.bundle.space->size() == 4);
  CHECK(doc.bundle.space->dimension() == 1);
  CHECK(doc.bundle.space->adjacent(2, 3));
  CHECK(doc.bundle.cover.size() == 3);
  CHECK(doc.bundle.map.invertible());
  CHECK(doc.bundle.map.images(3)[0] == 0);
  CHECK_FALSE(doc.bundle.truncation_depth.has_value());
  REQUIRE(doc.vectors.size() == 1);
  CHECK(doc.vectors[0].values == std::vector<double>{1, -1, 1, -1});

  const ModelDocument again = parse_model(model_to_json(doc.bundle));
  CHECK(again.bundle.cover == doc.bundle.cover);
  CHECK(*again.bundle.space == *doc.bundle.space);
  CHECK(again.bundle.map.relation() == doc.bundle.map.relation());
}

TEST_CASE("a model without a map uses the identity") {
  const auto doc = parse_model(R"({"cells": 2, "cover": [[0], [1]], "depth": 3})");
  CHECK(doc.bundle.map.images(1)[0] == 1);
  CHECK(doc.bundle.truncation_depth == std::optional<std::size_t>(3));
}

TEST_CASE("model errors name the line or the field") {
  CHECK(error_of([] { parse_model("{\n  \"cells\": 4,\n  \"cover\": [[0, 1]\n}", "m.json"); })
            .find("m.json:4:") == 0);
  CHECK(error_of([] { parse_model(R"({"cover": [[0]]})"); }).find("'cells'") != std::string::npos);
  CHECK(error_of([] { parse_model(R"({"cells": "four", "cover": []})"); })
            .find("wrong type") != std::string::npos);
  CHECK(error_of([] { parse_model(R"({"cells": 2, "cover": [[0, 1]], "map": {"0": [1]}})"); })
            .find("cell 1") != std::string::npos);
  CHECK(error_of([] { parse_model(R"({"cells": 2, "cover": [[0, 1]], "map": {"x": [1]}})"); })
            .find("'x'") != std::string::npos);
  CHECK(error_of([] { parse_model(R"({"version": 2, "cells": 1, "cover": [[0]]})"); })
            .find("version") != std::string::npos);
  CHECK(error_of([] { parse_model(R"({"cells": 2, "cover": [[0, 1]], "vectors": [[1]]})"); })
            .find("vectors[0]") != std::string::npos);
  CHECK_THROWS_AS(parse_model(R"({"cells": 3, "cover": [[0, 1]]})"), CoveringError);
}

TEST_CASE("matrices load from JSON or CSV") {
  const auto a = parse_matrix(R"({"alphabet": 2, "matrix": [[1, 1], [1, 0]]})");
  const auto b = parse_matrix("1,1\n1, 0\n\n");
  CHECK(a == b);
  CHECK(a == TransferMatrix::golden_mean());
  CHECK(parse_matrix(matrix_to_json(a)) == a);
  CHECK(error_of([] { parse_matrix("1,1\n1,2\n", "m.csv"); }).find("m.csv:2:") == 0);
  CHECK(error_of([] { parse_matrix(R"({"alphabet": 3, "matrix": [[1]]})"); })
            .find("alphabet") != std::string::npos);
}

TEST_CASE("numbers and tables render byte-stably") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.69314718055994529) == "0.69314718056");
  CHECK(format_number(1e-15) == "1e-15");

  CHECK(series_csv({}, "x") == "label,n,count,exact,mode\n");
  ExperimentResult r;
  r.mode = Mode::cpc;
  r.series.add(1, 2);
  r.series.add(2, 3, false);
  CHECK(series_csv({r}, "g") ==
        "label,n,count,exact,mode\ng,1,2,true,cpc\ng,2,3,false,cpc\n");
  CHECK(audit_csv({}) == "n,rank,approx_error,mult_defect,trace_defect\n");
  CHECK(audit_csv({{3, 5, 0.25, 0.0, 1e-3}}) ==
        "n,rank,approx_error,mult_defect,trace_defect\n3,5,0.25,0,0.001\n");
}

TEST_CASE("line and column of an offset") {
  CHECK(line_column("ab\ncd", 0) == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(line_column("ab\ncd", 4) == std::pair<std::size_t, std::size_t>{2, 2});
}
