// Copyright 2026 The Fusebox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>
#include <string>
#include <thread>

#include "fusebox/core/types.hpp"
#include "fusebox/merger/merger.hpp"

namespace httplib {
class Server;
}

namespace fusebox {

/// HTTP face of the merger: `POST /merge` takes a fusion request,
/// `GET /events` returns the merge-event log as JSON lines, `GET /health`.
class MergerService {
 public:
  MergerService(Merger& merger, std::string host, std::uint16_t port = 0);
  ~MergerService();

  void start();
  void stop();
  Address address() const { return {host_, port_}; }

 private:
  Merger& merger_;
  std::string host_;
  std::uint16_t port_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace fusebox
