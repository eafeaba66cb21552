#pragma once

#include <string>
#include <vector>

namespace iodeep::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kNoMatchingNetwork = 3,
  kConnection = 4,
};

struct Output {
  /// Human-readable lines instead of JSON.
  bool quiet = false;
};

struct PackArgs {
  std::string architecture;
  std::string weights;
  std::string name;
  std::string modality;
  std::string body_part;
  unsigned samples = 1;
  std::string photometric = "MONOCHROME2";
  std::string uid;
  std::string out;
  /// "store" (payload next to the file, fetched through the service),
  /// "inline" (data: URI) or "path" (absolute file path).
  std::string weights_mode = "store";
};

struct PredictArgs {
  std::string server;
  std::string slice;
  std::string out;
};

struct SubmitArgs {
  std::string server;
  /// Prediction output written by `predict`; supplies session and count.
  std::string from;
  std::string session;
  std::string reviewer;
  std::vector<std::string> decisions;
  bool accept_all = false;
};

struct SynthArgs {
  std::string out;
  unsigned count = 10;
  unsigned long long seed = 1;
  std::string modality = "MR";
  std::string body_part = "BRAIN";
  std::string study_description = "Synthetic blob study";
};

int cmd_pack(const PackArgs& args, const Output& out);
int cmd_serve(const std::string& store, const std::string& bind, unsigned threads);
int cmd_import(const std::string& server, const std::vector<std::string>& files, const Output& out);
int cmd_ls(const std::string& server, const std::string& level, const std::vector<std::string>& filters,
           const Output& out);
int cmd_predict(const PredictArgs& args, const Output& out);
int cmd_submit(const SubmitArgs& args, const Output& out);
int cmd_synth(const SynthArgs& args, const Output& out);

}  // namespace iodeep::cli
