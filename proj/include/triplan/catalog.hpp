#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace triplan {

using CategoryId = int;

enum class CategoryKind : std::uint8_t {
  Structure,  // walls / floor; occupancy only, never an object instance
  Furniture,  // large hosts and appliances; block movement
  Item,       // small pickupable objects
};

struct CategoryInfo {
  std::string name;
  CategoryKind kind = CategoryKind::Item;
  bool pickupable = false;
  bool openable = false;     // containment hides contents while closed
  bool surface = false;      // can host items without hiding them
  bool blocking = false;     // occupies floor for navigation
  bool toggleable = false;
  bool sliceable = false;
  bool cleanable = false;
  bool heatable = false;
  bool coolable = false;
};

struct UnknownCategory : std::runtime_error {
  explicit UnknownCategory(const std::string& name)
      : std::runtime_error("unknown category: " + name) {}
};

// Fixed category catalog. Ids are stable (index order below); the instance
// map sizes its category axis from size().
class Catalog {
 public:
  static const Catalog& standard();

  CategoryId id(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }
  const CategoryInfo& info(CategoryId id) const { return infos_.at(static_cast<std::size_t>(id)); }
  const std::string& name(CategoryId id) const { return info(id).name; }
  int size() const { return static_cast<int>(infos_.size()); }

  CategoryId wall() const { return wall_; }
  CategoryId floor() const { return floor_; }

  std::vector<CategoryId> items() const;       // pickupable categories
  std::vector<CategoryId> furniture() const;   // blocking hosts/appliances

 private:
  Catalog();
  std::vector<CategoryInfo> infos_;
  std::map<std::string, CategoryId> index_;
  CategoryId wall_ = -1;
  CategoryId floor_ = -1;
};

}  // namespace triplan
