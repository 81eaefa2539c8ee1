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


#include <holonomy/server.hpp>

#include <httplib.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <vector>

namespace holonomy {

namespace {

using nlohmann::json;

// Shared by the stream transports: one writer lock per connection so that
// frame pushes from other threads never interleave with responses.
class LineConnection
{
public:
  LineConnection(Service& service, std::function<void(const std::string&)> write)
  : _service(service), _write(std::move(write))
  {
    _token = _service.subscribe([this](const std::string& id, const json& frame)
      {
        bool wanted;
        {
          std::lock_guard<std::mutex> lock(_mutex);
          wanted = _subscribed.contains(id);
        }
        if (wanted)
          send({{"event", "frame"}, {"session", id}, {"frame", frame}});
      });
  }

  ~LineConnection() { _service.unsubscribe(_token); }

  LineConnection(const LineConnection&) = delete;
  LineConnection& operator=(const LineConnection&) = delete;

  /// Returns false if the line was not valid JSON.
  bool handle_line(const std::string& line)
  {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      return true;

    json request;
    try
    {
      request = json::parse(line);
    }
    catch (const json::parse_error& e)
    {
      send({{"ok", false}, {"error", {{"code", "bad-request"}, {"message", e.what()}}}});
      return false;
    }

    if (request.is_object() && request.value("op", std::string()) == "subscribe")
    {
      const std::string id = request.value("session", std::string());
      json response;
      try
      {
        _service.snapshot(id);
        {
          std::lock_guard<std::mutex> lock(_mutex);
          _subscribed.insert(id);
        }
        response = {{"ok", true}, {"subscribed", id}};
      }
      catch (const ServiceError& e)
      {
        response = {{"ok", false}, {"error", {{"code", e.code()}, {"message", e.what()}}}};
      }
      if (request.contains("id"))
        response["id"] = request.at("id");
      send(response);
      return true;
    }

    send(_service.handle(request));
    return true;
  }

private:
  void send(const json& message)
  {
    std::lock_guard<std::mutex> lock(_write_mutex);
    _write(message.dump() + "\n");
  }

  Service& _service;
  std::function<void(const std::string&)> _write;
  std::size_t _token = 0;
  std::mutex _mutex;
  std::mutex _write_mutex;
  std::set<std::string> _subscribed;
};

void serve_socket(Service& service, int fd)
{
  LineConnection conn(service, [fd](const std::string& text)
    {
      std::size_t sent = 0;
      while (sent < text.size())
      {
        const ssize_t n = ::send(fd, text.data() + sent, text.size() - sent, MSG_NOSIGNAL);
        if (n <= 0)
          return;
        sent += static_cast<std::size_t>(n);
      }
    });

  std::string buffer;
  char chunk[4096];
  while (true)
  {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0)
      break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t pos;
    while ((pos = buffer.find('\n')) != std::string::npos)
    {
      conn.handle_line(buffer.substr(0, pos));
      buffer.erase(0, pos + 1);
    }
  }
  ::close(fd);
}

} // namespace

std::size_t serve_stream(Service& service, std::istream& in, std::ostream& out)
{
  std::mutex out_mutex;
  LineConnection conn(service, [&out](const std::string& text)
    {
      out << text;
      out.flush();
    });

  std::size_t failures = 0;
  std::string line;
  while (std::getline(in, line))
  {
    if (!conn.handle_line(line))
      ++failures;
  }
  return failures;
}

void serve_tcp(
  Service& service,
  const std::string& host,
  int port,
  const std::atomic<bool>& stop,
  const std::function<void(int)>& on_listening)
{
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0)
    throw std::runtime_error("cannot create a socket");
  const int yes = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
  {
    ::close(listener);
    throw std::invalid_argument("bad IPv4 host '" + host + "'");
  }
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0
    || ::listen(listener, 16) != 0)
  {
    ::close(listener);
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  }

  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listening)
    on_listening(ntohs(addr.sin_port));

  std::vector<std::thread> workers;
  while (!stop.load())
  {
    pollfd pfd{listener, POLLIN, 0};
    if (::poll(&pfd, 1, 100) <= 0)
      continue;
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0)
      continue;
    workers.emplace_back(serve_socket, std::ref(service), fd);
  }

  ::close(listener);
  for (auto& w : workers)
    w.join();
}

void register_http(httplib::Server& server, Service& service)
{
  static const char* const ops[] = {
    "new-session", "move", "state", "guidance", "minimap", "save", "load"};

  const auto reply = [](httplib::Response& res, const json& body)
    {
      int status = 200;
      if (!body.value("ok", false))
      {
        const std::string code = body["error"].value("code", std::string());
        status = code == "unknown-session" ? 404
          : code == "unsatisfiable" ? 422
          : code == "stale-guidance" ? 409
          : 400;
      }
      res.status = status;
      res.set_content(body.dump(), "application/json");
    };

  for (const char* op : ops)
  {
    const std::string name = op;
    server.Post("/" + name, [&service, name, reply](const httplib::Request& req, httplib::Response& res)
      {
        json request;
        try
        {
          request = req.body.empty() ? json::object() : json::parse(req.body);
        }
        catch (const json::parse_error& e)
        {
          reply(res, {{"ok", false}, {"error", {{"code", "bad-request"}, {"message", e.what()}}}});
          return;
        }
        if (!request.is_object())
        {
          reply(res, {{"ok", false}, {"error", {{"code", "bad-request"}, {"message", "body must be an object"}}}});
          return;
        }
        request["op"] = name;
        reply(res, service.handle(request));
      });
  }

  server.Get(R"(/state/([A-Za-z0-9\-]+))", [&service, reply](const httplib::Request& req, httplib::Response& res)
    {
      reply(res, service.handle({{"op", "state"}, {"session", req.matches[1].str()}}));
    });

  server.Get(R"(/minimap/([A-Za-z0-9\-]+)\.svg)", [&service, reply](const httplib::Request& req, httplib::Response& res)
    {
      const json body = service.handle({
        {"op", "minimap"},
        {"session", req.matches[1].str()},
        {"with_path", req.has_param("path")},
        {"svg", true}});
      if (!body.value("ok", false))
      {
        reply(res, body);
        return;
      }
      res.set_content(body["svg"].get<std::string>(), "image/svg+xml");
    });
}

} // namespace holonomy
