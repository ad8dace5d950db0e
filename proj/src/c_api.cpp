#include "sfdrecon.h"

#include <cstring>
#include <sstream>
#include <string>

#include "sfdrecon/errors.hpp"
#include "sfdrecon/experiments.hpp"

struct sfd_config {
  sfd::ExperimentConfig cfg;
};

struct sfd_result {
  sfd::ReconstructionResult recon;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
sfd_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SFD_OK;
  } catch (const sfd::ConfigError& e) {
    g_last_error = e.what();
    return SFD_ERR_CONFIG;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SFD_ERR_NUMERIC;
  }
}

}  // namespace

extern "C" {

const char* sfd_version(void) { return sfd::kVersion; }

const char* sfd_last_error(void) { return g_last_error.c_str(); }

sfd_config* sfd_config_create(void) { return new sfd_config{}; }

void sfd_config_destroy(sfd_config* config) { delete config; }

sfd_status sfd_config_set(sfd_config* config, const char* key, const char* value) {
  if (config == nullptr || key == nullptr || value == nullptr) {
    g_last_error = "sfd_config_set: null argument";
    return SFD_ERR_CONFIG;
  }
  return guarded([&] { config->cfg.set(key, value); });
}

sfd_status sfd_config_load_file(sfd_config* config, const char* path) {
  if (config == nullptr || path == nullptr) {
    g_last_error = "sfd_config_load_file: null argument";
    return SFD_ERR_CONFIG;
  }
  return guarded([&] { config->cfg.load_file(path); });
}

sfd_status sfd_config_get(const sfd_config* config, const char* key, char* buffer, size_t size) {
  if (config == nullptr || key == nullptr || buffer == nullptr || size == 0) {
    g_last_error = "sfd_config_get: null argument";
    return SFD_ERR_CONFIG;
  }
  for (const auto& [k, v] : config->cfg.items()) {
    if (k == key) {
      std::strncpy(buffer, v.c_str(), size - 1);
      buffer[size - 1] = '\0';
      return SFD_OK;
    }
  }
  g_last_error = std::string("sfd_config_get: unknown key '") + key + "'";
  return SFD_ERR_CONFIG;
}

sfd_status sfd_run_kernels(const sfd_config* config) {
  return guarded([&] { sfd::emit_kernels(config->cfg); });
}

sfd_status sfd_run_forward(const sfd_config* config) {
  return guarded([&] { sfd::emit_forward(config->cfg); });
}

sfd_status sfd_run_ensemble(const sfd_config* config) {
  return guarded([&] { sfd::emit_ensemble(config->cfg); });
}

sfd_status sfd_run_moments(const sfd_config* config) {
  return guarded([&] { sfd::emit_moments(config->cfg); });
}

sfd_status sfd_run_invert(const sfd_config* config, sfd_result** result) {
  return guarded([&] {
    sfd::ExperimentResult res = sfd::emit_invert(config->cfg);
    if (result != nullptr) {
      *result = new sfd_result{std::move(res.recon)};
    }
  });
}

sfd_status sfd_run_experiment(const sfd_config* config, sfd_result** result) {
  return guarded([&] {
    sfd::ExperimentResult res = sfd::run_experiment(config->cfg);
    if (result != nullptr) {
      *result = new sfd_result{std::move(res.recon)};
    }
  });
}

sfd_status sfd_run_sweep(const sfd_config* config, const char* axis, const char* values) {
  if (axis == nullptr || values == nullptr) {
    g_last_error = "sfd_run_sweep: null argument";
    return SFD_ERR_CONFIG;
  }
  return guarded([&] {
    std::vector<double> vals;
    std::istringstream ss(values);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw sfd::ConfigError("sweep: cannot parse value '" + cell + "'");
      }
    }
    sfd::sweep(config->cfg, axis, vals);
  });
}

sfd_status sfd_result_metric(const sfd_result* result, const char* name, double* value) {
  if (result == nullptr || name == nullptr || value == nullptr) {
    g_last_error = "sfd_result_metric: null argument";
    return SFD_ERR_CONFIG;
  }
  const std::string key(name);
  if (key == "er_g1") *value = result->recon.er_g1;
  else if (key == "er_g2abs") *value = result->recon.er_g2abs;
  else if (key == "iterations_g1") *value = result->recon.iterations_g1;
  else if (key == "iterations_g2") *value = result->recon.iterations_g2;
  else if (key == "clamp_count") *value = static_cast<double>(result->recon.clamp_count);
  else {
    g_last_error = "sfd_result_metric: unknown metric '" + key + "'";
    return SFD_ERR_CONFIG;
  }
  return SFD_OK;
}

void sfd_result_destroy(sfd_result* result) { delete result; }

}  // extern "C"
