#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "treeshift/treeshift.hpp"

namespace treeshift::io {

using Json = nlohmann::json;

/// Parses text and throws InputError naming the byte offset on malformed JSON.
Json parse(const std::string& text, const std::string& source = "<input>");
Json read_file(const std::string& path);

/// Vertices are written as a number, an [i, j] pair or a string.
VertexId vertex_from_json(const Json& j, const std::string& where);
Json vertex_to_json(const VertexId& id);

Complex complex_from_json(const Json& j, const std::string& where);
Json complex_to_json(Complex z);

/// {"family": ..., "params": {...}} or {"vertices": [...], "edges": [[p, c], ...],
/// "truncated": [...]}.
DirectedTree tree_from_json(const Json& j);
Json tree_to_json(const DirectedTree& tree);

/// {"weights": [{"v": vertex, "re": x, "im": y}, ...]}.
WeightedShift weights_from_json(DirectedTree tree, const Json& j, bool require_all = false);
Json weights_to_json(const WeightedShift& shift);

/// A plain list of weights, or vertex-keyed entries. For keyed entries the
/// smallest vertex fixes the first position and is returned in first_vertex.
std::vector<Complex> weight_list_from_json(const Json& j, int* first_vertex = nullptr);

/// {"atoms": [{"x": position, "w": mass}, ...]}.
AtomicMeasure measure_from_json(const Json& j, const std::string& where = "measure");
Json measure_to_json(const AtomicMeasure& mu);

/// {"t": [t0, t1, ...]}, or a bare array.
MomentSequence moments_from_json(const Json& j);

/// {"measures": {vertex: measure-doc}, "eps": {vertex: number}}. A missing eps
/// defaults to the mass the measure puts at 0.
MeasureSystem system_from_json(const DirectedTree& tree, const Json& j);
Json system_to_json(const DirectedTree& tree, const MeasureSystem& system);

/// {"eta", "kappa": int | "inf", "branch_measures", "entry_weights",
/// "branch_weights", "trunk_weights", "nu"}.
BranchData branch_from_json(const Json& j);

Json finding_to_json(const Finding& f, const DirectedTree* tree);
Json verdict_to_json(const StieltjesVerdict& v);
Json validation_to_json(const ValidationReport& r);
Json consistency_to_json(const ConsistencyReport& r, const DirectedTree& tree);
Json certificate_to_json(const Certificate& c, const DirectedTree& tree);
Json model_certificate_to_json(const ModelCertificate& c);
Json truncation_to_json(const TruncationEntry& e, const TruncationReport& r);
Json convergence_to_json(const ConvergenceReport& r, const DirectedTree& tree);
Json carleman_to_json(const CarlemanDiagnostic& d);

}  // namespace treeshift::io
