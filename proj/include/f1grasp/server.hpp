#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "f1grasp/teleop.hpp"

namespace f1grasp {

struct ServerConfig {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  std::vector<SuiteObject> suite;
  /// Session used for new connections until the client sends a reset.
  SessionConfig defaults;
  /// Wall-clock period of one tick; zero uses the session tick.
  std::chrono::microseconds wall_tick{0};
  /// Session logs are written here when non-empty.
  std::string record_dir;
  /// Stop cleanly on SIGINT/SIGTERM.
  bool handle_signals = false;
};

/// WebSocket teleoperation server. Connecting to "/" opens a new session owned by that client;
/// "/watch/<id>" subscribes to the frames of an existing session.
class TeleopServer {
 public:
  explicit TeleopServer(ServerConfig config);
  ~TeleopServer();
  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  /// Binds the listener; returns the bound port.
  unsigned short listen();
  /// Serves until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace f1grasp
