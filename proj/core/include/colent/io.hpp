#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "colent/cellspace.hpp"
#include "colent/cpapprox.hpp"
#include "colent/estimator.hpp"
#include "colent/symbolic.hpp"

namespace colent {

/// A model file: the bundle plus optional per-cell vectors (for the l1
/// constant) and functions (for approximation audits).
struct ModelDocument {
  ModelBundle bundle;
  std::vector<FunctionSample> vectors;
  std::vector<FunctionSample> functions;
};

/// Parses {"version":1, "cells":N, "adjacency":[[i,j],...], "dimension":d,
/// "cover":[[...],...], "map":{"i":[j,...]}, "invertible":bool} with optional
/// "depth", "vectors" and "functions". A missing map means the identity.
/// Throws StructuralError with the offending line/column or field.
ModelDocument parse_model(const std::string& text, const std::string& source = "<model>");
ModelDocument load_model(const std::string& path);
std::string model_to_json(const ModelBundle& bundle);

/// {"alphabet":k, "matrix":[[0|1,...],...]} or plain CSV rows of 0/1.
TransferMatrix parse_matrix(const std::string& text, const std::string& source = "<matrix>");
TransferMatrix load_matrix(const std::string& path);
std::string matrix_to_json(const TransferMatrix& matrix);

/// Shortest round-trip-stable rendering used in every table: %.12g.
std::string format_number(double value);

/// label,n,count,exact,mode rows; header only for an empty list.
std::string series_csv(const std::vector<ExperimentResult>& results, const std::string& label);
/// n,rank,approx_error,mult_defect,trace_defect rows.
std::string audit_csv(const std::vector<AuditRow>& rows);

/// 1-based line and column of a byte offset, for parse diagnostics.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace colent
