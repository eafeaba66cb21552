#include "fixtures.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <nlohmann/json.hpp>

extern char** environ;

#include "iodeep/dicom/file.hpp"
#include "iodeep/iod/iodeep.hpp"
#include "iodeep/nn/model.hpp"

namespace iodeep::fixtures {

namespace fs = std::filesystem;
using json = nlohmann::json;

TempDir::TempDir() {
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("iodeep-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path assets_dir() { return IODEEP_TEST_ASSETS; }
std::filesystem::path data_dir() { return IODEEP_TEST_DATA; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Network toy_unet() {
  const auto dir = assets_dir() / "networks";
  return {read_text(dir / "toy_unet.json"), dicom::read_bytes(dir / "toy_unet.iodw")};
}

nn::WeightStore random_weights(const nn::NetworkDescriptor& net, std::uint64_t seed, float scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, scale);
  std::uniform_real_distribution<float> positive(0.5f, 2.0f);
  const auto shapes = nn::infer_shapes(net);
  nn::WeightStore store;
  for (const auto& layer : net.layers) {
    for (const auto& [name, shape] : nn::expected_weights(layer, shapes.at(layer.inputs.front()))) {
      std::vector<float> values(shape.volume());
      const bool variance = name.ends_with("running_var");
      for (auto& v : values) v = variance ? positive(rng) : normal(rng);
      store.entries.emplace(name, nn::Tensor(shape, std::move(values)));
    }
  }
  return store;
}

std::vector<std::uint8_t> file_bytes(const dicom::DataSet& body) {
  return dicom::encode_file(dicom::DicomFile::from_body(body));
}

std::string seed_network(pacs::Repository& repo, const Network& net, const std::string& dnn_uid,
                         const std::string& modality, const std::string& body_part, const std::string& name) {
  repo.store_weights(dnn_uid, net.weights);
  const auto desc = iod::make_descriptor(dnn_uid, name, net.architecture, pacs::weights_locator(dnn_uid),
                                         modality, body_part);
  repo.store_instance(file_bytes(iod::build_iodeep(desc)));
  return dnn_uid;
}

RunResult run(const std::string& command) {
  RunResult r;
  FILE* pipe = ::popen((command + " 2>/dev/null").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed for " + command);
  std::array<char, 4096> buf{};
  while (const auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

ServeProcess::ServeProcess(const std::string& cli, const fs::path& store) {
  int out[2];
  if (::pipe(out) != 0) throw std::runtime_error("pipe failed");
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, out[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, out[0]);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
  const std::string store_arg = store.string();
  std::vector<std::string> args{cli, "serve", "--store", store_arg, "--bind", "127.0.0.1:0", "--threads", "8"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  const int rc = ::posix_spawn(&pid_, cli.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(out[1]);
  if (rc != 0) {
    ::close(out[0]);
    throw std::runtime_error("cannot start " + cli);
  }
  // The first stdout line is {"store", "host", "port"}.
  std::string line;
  char c = 0;
  while (::read(out[0], &c, 1) == 1 && c != '\n') line += c;
  ::close(out[0]);
  try {
    port_ = json::parse(line).at("port").get<int>();
  } catch (const std::exception&) {
    ::kill(pid_, SIGTERM);
    ::waitpid(pid_, nullptr, 0);
    throw std::runtime_error("serve did not report a port: '" + line + "'");
  }
}

ServeProcess::~ServeProcess() {
  if (pid_ <= 0) return;
  ::kill(pid_, SIGTERM);
  ::waitpid(pid_, nullptr, 0);
}

}  // namespace iodeep::fixtures
