#pragma once

#include "gdsl/scoring.hpp"
#include "gdsl/search.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gdsl {

/// Graph file: {"vertices": [names], "edges": [[src, dst], ...]} with 0-based
/// indices. If expected_names is non-empty the file's vertices must match.
CandidateGraph graph_from_json_text(const std::string& text,
                                    const std::vector<std::string>& expected_names);
CandidateGraph graph_from_json_file(const std::filesystem::path& path,
                                    const std::vector<std::string>& expected_names);
std::string graph_to_json_text(const CandidateGraph& graph, const std::vector<std::string>& names);

/// GraphViz rendering with vertex names as node labels.
std::string graph_to_dot(const CandidateGraph& graph, const std::vector<std::string>& names);

std::string score_report_to_json_text(const ScoreReport& report,
                                      const std::vector<std::string>& names);

std::string search_result_to_json_text(const SearchResult& result, const SearchConfig& config,
                                       const std::vector<std::string>& names);

} // namespace gdsl
