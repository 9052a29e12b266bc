#include "pipeflow/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pipeflow {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void config_error(const std::filesystem::path& file, std::size_t line,
                               const std::string& what) {
  throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

APSeries parse_flux_terms(const std::string& text) {
  std::vector<APTerm> raw;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    double xi = 0, re = 0, im = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ts(item);
    if (!(ts >> xi >> c1 >> re >> c2 >> im) || c1 != ':' || c2 != ':')
      throw std::runtime_error("flux.terms: expected 'xi:re:im', got '" + item + "'");
    raw.push_back({xi, Complex(re, im)});
  }
  return APSeries::from_terms(raw);
}

APSeries RunConfig::load_flux() const {
  if (flux_terms) return *flux_terms;
  if (flux_file) {
    if (!std::filesystem::exists(*flux_file))
      throw std::runtime_error("flux file does not exist: " + flux_file->string());
    return APSeries::load(*flux_file);
  }
  throw std::runtime_error("no flux configured (set flux.file or flux.terms)");
}

RectangleBasis RunConfig::build_section() const {
  switch (kind) {
    case SectionKind::rectangle:
      return build_rectangle(a, b, modes);
    case SectionKind::disk:
      return build_disk(radius, modes, points);
    case SectionKind::grid: {
      if (mask_file.empty()) throw std::runtime_error("grid section requires section.mask");
      if (!std::filesystem::exists(mask_file))
        throw std::runtime_error("mask file does not exist: " + mask_file.string());
      if (h <= 0.0) throw std::runtime_error("grid section requires section.h > 0");
      int nx = 0, ny = 0;
      const auto mask = load_mask(mask_file, &nx, &ny);
      return build_grid(mask, nx, ny, h, modes);
    }
  }
  throw std::logic_error("unreachable section kind");
}

RunConfig parse_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config: " + file.string());

  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error(file, lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) config_error(file, lineno, "empty key or value");

    try {
      if (key == "section.kind") {
        if (value == "rectangle")
          cfg.kind = SectionKind::rectangle;
        else if (value == "disk")
          cfg.kind = SectionKind::disk;
        else if (value == "grid")
          cfg.kind = SectionKind::grid;
        else
          config_error(file, lineno, "unknown section.kind '" + value + "'");
      } else if (key == "section.a")
        cfg.a = std::stod(value);
      else if (key == "section.b")
        cfg.b = std::stod(value);
      else if (key == "section.radius")
        cfg.radius = std::stod(value);
      else if (key == "section.mask")
        cfg.mask_file = value;
      else if (key == "section.h")
        cfg.h = std::stod(value);
      else if (key == "section.modes")
        cfg.modes = std::stoi(value);
      else if (key == "section.points")
        cfg.points = std::stoi(value);
      else if (key == "nu")
        cfg.nu = std::stod(value);
      else if (key == "flux.file")
        cfg.flux_file = std::filesystem::path(value);
      else if (key == "flux.terms")
        cfg.flux_terms = parse_flux_terms(value);
      else if (key == "time.dt")
        cfg.dt = std::stod(value);
      else if (key == "time.T")
        cfg.T = std::stod(value);
      else if (key == "march.projection") {
        if (value == "on")
          cfg.projection = true;
        else if (value == "off")
          cfg.projection = false;
        else
          config_error(file, lineno, "march.projection must be on/off");
      } else if (key == "march.scheme") {
        if (value != "trapezoid")
          config_error(file, lineno, "march.scheme is fixed to 'trapezoid'");
      } else if (key == "sweep.frequencies")
        cfg.sweep_frequencies = parse_double_list(value);
      else if (key == "probes") {
        std::string item;
        std::istringstream ss(value);
        while (std::getline(ss, item, ';')) {
          item = trim(item);
          if (item.empty()) continue;
          const auto vals = parse_double_list(item);
          if (vals.size() != 2)
            config_error(file, lineno, "probes: expected 'x,y; x,y'");
          cfg.probes.push_back({vals[0], vals[1]});
        }
      } else if (key == "gate.c")
        cfg.gate_c = std::stod(value);
      else if (key == "gate.nu0") {
        if (value == "on")
          cfg.gate_nu0 = true;
        else if (value == "off")
          cfg.gate_nu0 = false;
        else
          config_error(file, lineno, "gate.nu0 must be on/off");
      } else if (key == "out.dir")
        cfg.out_dir = value;
      else
        config_error(file, lineno, "unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      config_error(file, lineno, "bad numeric value for '" + key + "'");
    } catch (const std::out_of_range&) {
      config_error(file, lineno, "numeric value out of range for '" + key + "'");
    }
  }

  if (cfg.nu <= 0.0) throw std::runtime_error("config: nu must be positive");
  if (cfg.dt <= 0.0) throw std::runtime_error("config: time.dt must be positive");

  // referenced files are relative to the config file itself
  const auto base = file.parent_path();
  if (!cfg.mask_file.empty() && cfg.mask_file.is_relative())
    cfg.mask_file = base / cfg.mask_file;
  if (cfg.flux_file && cfg.flux_file->is_relative()) cfg.flux_file = base / *cfg.flux_file;
  return cfg;
}

}  // namespace pipeflow
