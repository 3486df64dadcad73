#pragma once

/// Tabular file formats (comma separated, fixed header) and atomic writes.
///
///   trajectories: t,label,x,y        one row per observed label-time, t 1-based
///   network:      t,label_i,label_j  edges present, upper triangle only
///   label map:    label,individual   validation-only ground truth
///   chain:        iteration,<parameters...>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "socmov/sampler.hpp"
#include "socmov/simulate.hpp"

namespace socmov {

inline constexpr int kFormatVersion = 1;

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Shortest representation that reads back to the same double.
std::string format_double(double value);

/// Write to a sibling temporary file, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::string trajectory_csv(const MlmdDataset& data);

/// Parse a trajectory table. Labels are opaque text and receive ids in order
/// of first appearance (by time, then file order). The horizon is the largest
/// t. Rejects duplicate (t, label) rows and labels with gaps.
MlmdDataset parse_trajectory_csv(std::string_view text);

std::string network_csv(const DynamicNetwork& network, const std::vector<std::string>& names);
/// Individuals are written by name when `individual_names` is given, else 1-based.
std::string label_map_csv(const MlmdDataset& data, const std::vector<std::string>& individual_names = {});

std::string chain_csv(const PosteriorSamples& samples);

struct ChainTable {
    std::vector<std::string> names;
    std::vector<int> iterations;
    Eigen::MatrixXd draws;
};

ChainTable parse_chain_csv(std::string_view text);

/// Reassemble complete trajectories (labels as individuals) from a parsed
/// uncensored dataset.
std::vector<PositionFrame> frames_of(const MlmdDataset& data);

}  // namespace socmov
