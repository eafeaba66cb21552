#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iodeep/dicom/dataset.hpp"
#include "iodeep/nn/weights.hpp"
#include "iodeep/pacs/repository.hpp"

namespace iodeep::fixtures {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path assets_dir();
std::filesystem::path data_dir();
std::string read_text(const std::filesystem::path& path);

struct Network {
  std::string architecture;
  std::vector<std::uint8_t> weights;
};

/// The trained toy Unet shipped in assets/networks.
Network toy_unet();

/// Normal(0, scale) weights for every parametric layer; batch-norm
/// variances are drawn positive.
nn::WeightStore random_weights(const nn::NetworkDescriptor& net, std::uint64_t seed, float scale = 0.5f);

/// Part-10 bytes of a body.
std::vector<std::uint8_t> file_bytes(const dicom::DataSet& body);

/// Uploads the weights and an IODeep instance pointing at them; returns
/// the DnnUID.
std::string seed_network(pacs::Repository& repo, const Network& net, const std::string& dnn_uid,
                         const std::string& modality, const std::string& body_part,
                         const std::string& name = "toy_unet");

}  // namespace iodeep::fixtures

namespace iodeep::fixtures {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

/// Runs a shell command, capturing stdout; stderr is discarded.
RunResult run(const std::string& command);

/// `iodeep serve` on a free port, terminated on destruction.
class ServeProcess {
 public:
  ServeProcess(const std::string& cli, const std::filesystem::path& store);
  ~ServeProcess();
  ServeProcess(const ServeProcess&) = delete;
  ServeProcess& operator=(const ServeProcess&) = delete;

  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  int pid_ = -1;
  int port_ = -1;
};

}  // namespace iodeep::fixtures
