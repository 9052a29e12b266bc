// Flat key = value run configuration with dotted sections; one file drives
// one CLI invocation.
#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pipeflow/apseries.hpp"
#include "pipeflow/cross_section.hpp"

namespace pipeflow {

struct RunConfig {
  // section
  SectionKind kind = SectionKind::rectangle;
  double a = 1.0, b = 1.0;        // rectangle sides
  double radius = 1.0;            // disk
  std::filesystem::path mask_file;  // grid raster
  double h = 0.0;                 // grid spacing
  int modes = 41;                 // modes_per_axis / radial modes / grid eigenpairs
  int points = 2048;              // disk radial points

  double nu = 1.0;

  // flux: either a file or inline terms
  std::optional<std::filesystem::path> flux_file;
  std::optional<APSeries> flux_terms;

  // time grid for march runs
  double dt = 1e-3;
  double T = 0.0;
  bool projection = true;

  std::vector<double> sweep_frequencies;
  std::vector<std::array<double, 2>> probes;

  double gate_c = 1.0;
  bool gate_nu0 = false;

  std::filesystem::path out_dir = ".";
  double identity_ceiling = 1e-8;  // tolerance profile: default 1e-8, strict 1e-10

  APSeries load_flux() const;  // resolves file/inline; throws when neither is set
  RectangleBasis build_section() const;
};

// Parses "key = value" lines; '#' starts a comment. Unknown keys are errors,
// as are missing referenced files.
RunConfig parse_config(const std::filesystem::path& file);

// Inline flux grammar for config values: "xi:re:im; xi:re:im; ...".
APSeries parse_flux_terms(const std::string& text);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace pipeflow
