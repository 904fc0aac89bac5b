#include "uaradar/url.hpp"

#include "uaradar/text.hpp"

namespace uaradar {

std::string canonicalize_url(std::string_view url) {
  std::string_view rest = url;
  if (auto hash = rest.find('#'); hash != std::string_view::npos) {
    rest = rest.substr(0, hash);
  }
  std::string out;
  auto scheme_end = rest.find("://");
  if (scheme_end == std::string_view::npos) return std::string(rest);
  out = to_lower_ascii(rest.substr(0, scheme_end)) + "://";
  rest.remove_prefix(scheme_end + 3);
  auto host_end = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, host_end);
  // Userinfo is case-sensitive; only the host part is folded.
  if (auto at = authority.rfind('@'); at != std::string_view::npos) {
    out += authority.substr(0, at + 1);
    out += to_lower_ascii(authority.substr(at + 1));
  } else {
    out += to_lower_ascii(authority);
  }
  if (host_end != std::string_view::npos) out += rest.substr(host_end);
  return out;
}

std::string canonical_url_without_query(std::string_view url) {
  std::string canon = canonicalize_url(url);
  if (auto q = canon.find('?'); q != std::string::npos) canon.resize(q);
  return canon;
}

}  // namespace uaradar
