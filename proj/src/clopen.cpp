#include "cantor/clopen.hpp"

#include <algorithm>
#include <stdexcept>

namespace cantor {

namespace {
constexpr std::size_t kMaxGranularity = 22;
const std::string kRootAtomMarker = "\xce\x9b";  // capital lambda, UTF-8
}  // namespace

void Clopen::check_granularity(std::size_t g) {
  if (g > kMaxGranularity)
    throw std::length_error("Clopen: granularity " + std::to_string(g) + " exceeds the 2^22-atom budget");
}

Clopen Clopen::full() {
  return Clopen(0, std::vector<bool>{true});
}

Clopen Clopen::cylinder(const Bits& sigma) {
  check_granularity(sigma.size());
  std::vector<bool> mask(std::size_t{1} << sigma.size(), false);
  mask[sigma.index()] = true;
  return Clopen(sigma.size(), std::move(mask));
}

Clopen Clopen::from_cylinders(const std::vector<Bits>& sigmas) {
  Clopen acc;
  for (const auto& s : sigmas) acc = acc.unite(cylinder(s));
  return acc;
}

bool Clopen::is_empty() const {
  return std::none_of(mask_.begin(), mask_.end(), [](bool b) { return b; });
}

std::vector<Bits> Clopen::atoms() const {
  std::vector<Bits> out;
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) out.push_back(Bits::from_index(i, g_));
  return out;
}

std::size_t Clopen::atom_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
}

std::vector<bool> Clopen::mask_at(std::size_t g) const {
  if (g < g_) throw std::invalid_argument("Clopen::mask_at: cannot coarsen");
  check_granularity(g);
  std::vector<bool> mask(std::size_t{1} << g, false);
  const std::size_t copies = std::size_t{1} << (g - g_);
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i])
      for (std::size_t j = 0; j < copies; ++j) mask[i * copies + j] = true;
  return mask;
}

std::vector<Bits> Clopen::atoms_at(std::size_t g) const {
  std::vector<bool> mask = mask_at(g);
  std::vector<Bits> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(Bits::from_index(i, g));
  return out;
}

void Clopen::canonicalize() {
  // Merge sibling atoms while every pair agrees; empty set normalizes to g=0.
  while (g_ > 0) {
    bool mergeable = true;
    for (std::size_t i = 0; i + 1 < mask_.size(); i += 2)
      if (mask_[i] != mask_[i + 1]) {
        mergeable = false;
        break;
      }
    if (!mergeable) break;
    std::vector<bool> parent(mask_.size() / 2);
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = mask_[2 * i];
    mask_ = std::move(parent);
    --g_;
  }
}

Clopen Clopen::unite(const Clopen& o) const {
  const std::size_t g = std::max(g_, o.g_);
  std::vector<bool> a = mask_at(g), b = o.mask_at(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] || b[i];
  return Clopen(g, std::move(a));
}

Clopen Clopen::intersect(const Clopen& o) const {
  const std::size_t g = std::max(g_, o.g_);
  std::vector<bool> a = mask_at(g), b = o.mask_at(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] && b[i];
  return Clopen(g, std::move(a));
}

Clopen Clopen::difference(const Clopen& o) const {
  const std::size_t g = std::max(g_, o.g_);
  std::vector<bool> a = mask_at(g), b = o.mask_at(g);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] && !b[i];
  return Clopen(g, std::move(a));
}

Clopen Clopen::complement() const {
  Clopen c = *this;
  c.mask_.flip();
  c.canonicalize();
  return c;
}

Region Clopen::matches(const Bits& sigma) const {
  if (sigma.size() >= g_) {
    // The cylinder sits inside a single atom cell.
    return mask_[sigma.prefix(g_).index()] ? Region::inside : Region::outside;
  }
  // sigma is coarser than the atoms: look at all atoms below it.
  const std::size_t span = std::size_t{1} << (g_ - sigma.size());
  const std::size_t base = sigma.index() * span;
  bool any = false, all = true;
  for (std::size_t i = 0; i < span; ++i) {
    if (mask_[base + i]) any = true;
    else all = false;
  }
  if (all) return Region::inside;
  if (!any) return Region::outside;
  return Region::undetermined;
}

std::string Clopen::serialize() const {
  std::string out = "g=" + std::to_string(g_) + ";atoms=";
  bool first = true;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (!mask_[i]) continue;
    if (!first) out += ',';
    first = false;
    out += g_ == 0 ? kRootAtomMarker : Bits::from_index(i, g_).str();
  }
  return out;
}

Clopen Clopen::parse(const std::string& text) {
  const std::string g_key = "g=", a_key = ";atoms=";
  if (text.rfind(g_key, 0) != 0) throw std::invalid_argument("Clopen::parse: missing 'g='");
  auto apos = text.find(a_key);
  if (apos == std::string::npos) throw std::invalid_argument("Clopen::parse: missing ';atoms='");
  const std::size_t g = std::stoul(text.substr(g_key.size(), apos - g_key.size()));
  check_granularity(g);
  std::vector<bool> mask(std::size_t{1} << g, false);
  std::string body = text.substr(apos + a_key.size());
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto comma = body.find(',', pos);
    std::string token = body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (token == kRootAtomMarker) token.clear();
    Bits atom{token};
    if (atom.size() != g) throw std::invalid_argument("Clopen::parse: atom length != granularity");
    mask[atom.index()] = true;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return Clopen(g, std::move(mask));
}

}  // namespace cantor
