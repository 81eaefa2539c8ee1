/*
 * Copyright (C) 2026 The Holonomy Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/


#ifndef HOLONOMY__SERVER_HPP
#define HOLONOMY__SERVER_HPP

#include <holonomy/service.hpp>

#include <atomic>
#include <functional>
#include <iosfwd>
#include <string>

namespace httplib { class Server; }

namespace holonomy {

/// Serves line-delimited JSON requests from `in`, one response line per
/// request, until end of input. A {"op": "subscribe", "session": id} request
/// additionally pushes {"event": "frame", ...} lines for every accepted move
/// of that session. Returns the number of requests that failed to parse.
std::size_t serve_stream(Service& service, std::istream& in, std::ostream& out);

/// Accepts TCP connections on host:port, each served as a line stream on its
/// own thread. Runs until `stop` becomes true. Port 0 picks a free port,
/// reported through `on_listening`.
void serve_tcp(
  Service& service,
  const std::string& host,
  int port,
  const std::atomic<bool>& stop,
  const std::function<void(int)>& on_listening = {});

/// Registers POST /new-session, /move, /state, /guidance, /minimap, /save and
/// /load (JSON bodies, same schema as the stream protocol) plus
/// GET /state/<id> and GET /minimap/<id>.svg.
void register_http(httplib::Server& server, Service& service);

} // namespace holonomy

#endif // HOLONOMY__SERVER_HPP
