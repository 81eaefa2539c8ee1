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

#include <doctest.h>
#include <httplib.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <future>
#include <sstream>
#include <thread>

using namespace holonomy;
using nlohmann::json;

namespace {

std::vector<json> lines(const std::string& text)
{
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    out.push_back(json::parse(line));
  return out;
}

// Minimal blocking line client.
class LineClient
{
public:
  explicit LineClient(int port)
  {
    _fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::connect(_fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  }
  ~LineClient() { ::close(_fd); }

  void send(const json& j)
  {
    const std::string text = j.dump() + "\n";
    REQUIRE(::send(_fd, text.data(), text.size(), 0) == static_cast<ssize_t>(text.size()));
  }

  json receive()
  {
    std::size_t pos;
    while ((pos = _buffer.find('\n')) == std::string::npos)
    {
      char chunk[4096];
      const ssize_t n = ::recv(_fd, chunk, sizeof chunk, 0);
      REQUIRE(n > 0);
      _buffer.append(chunk, static_cast<std::size_t>(n));
    }
    const std::string line = _buffer.substr(0, pos);
    _buffer.erase(0, pos + 1);
    return json::parse(line);
  }

private:
  int _fd = -1;
  std::string _buffer;
};

} // namespace

TEST_SUITE("server")
{
  TEST_CASE("line stream")
  {
    Service service(Catalog::forest(), 3);
    std::istringstream in(
      R"({"op":"new-session","id":1,"config":{"objectives":[{"tile":"Nr","role":"flag"}]}})" "\n"
      "not json\n"
      "\n"
      R"({"op":"state","session":"missing","id":2})" "\n");
    std::ostringstream out;
    CHECK(serve_stream(service, in, out) == 1);
    const auto replies = lines(out.str());
    REQUIRE(replies.size() == 3);
    CHECK(replies[0].at("ok") == true);
    CHECK(replies[0].at("id") == 1);
    CHECK(replies[1].at("error").at("code") == "bad-request");
    CHECK(replies[2].at("error").at("code") == "unknown-session");
  }

  TEST_CASE("line stream pushes frames to subscribers")
  {
    Service service(Catalog::forest(), 3);
    const std::string id = service.handle({{"op", "new-session"}}).at("session").at("id");
    std::istringstream in(
      json({{"op", "subscribe"}, {"session", id}}).dump() + "\n"
      + json({{"op", "move"}, {"session", id}, {"move", "F"}}).dump() + "\n"
      + json({{"op", "subscribe"}, {"session", "nope"}}).dump() + "\n");
    std::ostringstream out;
    serve_stream(service, in, out);
    const auto replies = lines(out.str());
    REQUIRE(replies.size() == 4);
    CHECK(replies[0].at("subscribed") == id);
    CHECK(replies[1].at("event") == "frame");
    CHECK(replies[1].at("session") == id);
    CHECK(replies[2].at("session").at("step_counter") == 1);
    CHECK(replies[2].at("frame") == replies[1].at("frame"));
    CHECK(replies[3].at("error").at("code") == "unknown-session");
  }

  TEST_CASE("tcp")
  {
    Service service(Catalog::forest(), 3);
    std::atomic<bool> stop{false};
    std::promise<int> bound;
    std::thread server([&]
      { serve_tcp(service, "127.0.0.1", 0, stop, [&](int p) { bound.set_value(p); }); });
    const int port = bound.get_future().get();
    {
      LineClient a(port);
      LineClient b(port);
      a.send({{"op", "new-session"}});
      const json created = a.receive();
      const std::string id = created.at("session").at("id");

      b.send({{"op", "subscribe"}, {"session", id}});
      CHECK(b.receive().at("subscribed") == id);

      a.send({{"op", "move"}, {"session", id}, {"move", "F"}});
      CHECK(a.receive().at("session").at("step_counter") == 1);
      const json push = b.receive();
      CHECK(push.at("event") == "frame");
      CHECK(push.at("frame").at("center") == service.snapshot(id).walker.tile.to_string());
    }
    stop = true;
    server.join();
  }

  TEST_CASE("http")
  {
    Service service(Catalog::forest(), 3);
    httplib::Server http;
    register_http(http, service);
    const int port = http.bind_to_any_port("127.0.0.1");
    std::thread t([&] { http.listen_after_bind(); });
    http.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto created = client.Post("/new-session", R"({"config":{"seed":4}})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 200);
    const json body = json::parse(created->body);
    const std::string id = body.at("session").at("id");

    auto moved = client.Post("/move", json({{"session", id}, {"move", "F"}}).dump(), "application/json");
    REQUIRE(moved);
    CHECK(json::parse(moved->body).at("session").at("step_counter") == 1);

    auto hedge = client.Post("/move", json({{"session", id}, {"move", "F"}}).dump(), "application/json");
    CHECK(hedge->status == 400);
    CHECK(json::parse(hedge->body).at("error").at("hedge") == true);

    for (const char* op : {"/state", "/guidance", "/minimap", "/save"})
    {
      auto r = client.Post(op, json({{"session", id}}).dump(), "application/json");
      REQUIRE(r);
      CHECK_MESSAGE(r->status == 200, op);
    }
    const json doc = json::parse(client.Post("/save", json({{"session", id}}).dump(), "application/json")->body);
    auto loaded = client.Post("/load", json({{"document", doc.at("document")}}).dump(), "application/json");
    CHECK(loaded->status == 200);

    auto state = client.Get("/state/" + id);
    CHECK(state->status == 200);
    CHECK(client.Get("/state/unknown")->status == 404);
    auto svg = client.Get("/minimap/" + id + ".svg?path=1");
    CHECK(svg->status == 200);
    CHECK(svg->get_header_value("Content-Type") == "image/svg+xml");
    CHECK(client.Post("/move", "{oops", "application/json")->status == 400);

    http.stop();
    t.join();
  }
}
