#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "emis/emis.hpp"

namespace emis::cli {

/// File system or format failure while reading or writing an artifact.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV with one `# k=... delta=... provenance=...` preamble line and the header
/// alpha_index,beta_index,alpha_x,alpha_y,alpha_z,beta_x,beta_y,beta_z,weight_alpha,weight_beta,f_re,f_im
void write_dataset(const std::string& path, const ScatteringDataSet& data);
ScatteringDataSet read_dataset(const std::string& path);

/// Complex scalar per grid cell: `# grid radius=... n=... cells=...`, then x,y,z,re,im.
struct VolumeData {
  double radius = 0.0;
  int n_per_axis = 0;
  std::vector<Vec3> points;
  std::vector<Complex> values;
};

void write_volume(const std::string& path, const VolumeGrid& grid, std::span<const Complex> values);
VolumeData read_volume(const std::string& path);

/// Complex 3-vector per grid cell: x,y,z,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im.
struct FieldData {
  double radius = 0.0;
  int n_per_axis = 0;
  std::vector<Vec3> points;
  FieldValues E;
};

void write_field(const std::string& path, const VolumeGrid& grid, const FieldValues& E);
FieldData read_field(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

/// Creates the directory (and parents) if needed.
void ensure_directory(const std::string& path);

}  // namespace emis::cli
