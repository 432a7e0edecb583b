#include "triplan/catalog.hpp"

namespace triplan {

namespace {

CategoryInfo make_structure(const char* name) {
  CategoryInfo c;
  c.name = name;
  c.kind = CategoryKind::Structure;
  return c;
}

CategoryInfo make_furniture(const char* name, bool openable, bool surface,
                       bool toggleable = false) {
  CategoryInfo c;
  c.name = name;
  c.kind = CategoryKind::Furniture;
  c.openable = openable;
  c.surface = surface;
  c.blocking = true;
  c.toggleable = toggleable;
  return c;
}

CategoryInfo make_item(const char* name, bool sliceable = false, bool cleanable = false,
                  bool heatable = false, bool coolable = false) {
  CategoryInfo c;
  c.name = name;
  c.kind = CategoryKind::Item;
  c.pickupable = true;
  c.sliceable = sliceable;
  c.cleanable = cleanable;
  c.heatable = heatable;
  c.coolable = coolable;
  return c;
}

}  // namespace

Catalog::Catalog() {
  infos_.push_back(make_structure("Wall"));
  infos_.push_back(make_structure("Floor"));

  // Hosts and appliances.
  infos_.push_back(make_furniture("Cabinet", /*openable=*/true, /*surface=*/false));
  infos_.push_back(make_furniture("Drawer", true, false));
  infos_.push_back(make_furniture("Fridge", true, false));
  infos_.push_back(make_furniture("Microwave", true, false));
  infos_.push_back(make_furniture("Safe", true, false));
  infos_.push_back(make_furniture("CounterTop", false, true));
  infos_.push_back(make_furniture("DiningTable", false, true));
  infos_.push_back(make_furniture("Desk", false, true));
  infos_.push_back(make_furniture("SideTable", false, true));
  infos_.push_back(make_furniture("Shelf", false, true));
  infos_.push_back(make_furniture("Sofa", false, true));
  infos_.push_back(make_furniture("ArmChair", false, true));
  infos_.push_back(make_furniture("GarbageCan", false, true));
  infos_.push_back(make_furniture("Sink", false, true));
  infos_.push_back(make_furniture("FloorLamp", false, false, /*toggleable=*/true));
  infos_.push_back(make_furniture("DeskLamp", false, false, /*toggleable=*/true));

  // Items:              name          slice  clean  heat  cool
  infos_.push_back(make_item("Mug",         false, true,  true, true));
  infos_.push_back(make_item("Cup",         false, true,  true, true));
  infos_.push_back(make_item("Plate",       false, true,  true, true));
  infos_.push_back(make_item("Bowl",        false, true,  true, true));
  infos_.push_back(make_item("Pan",         false, true,  true, true));
  infos_.push_back(make_item("Pot",         false, true,  true, true));
  infos_.push_back(make_item("Knife",       false, true,  false, false));
  infos_.push_back(make_item("Fork",        false, true,  false, false));
  infos_.push_back(make_item("Spoon",       false, true,  false, false));
  infos_.push_back(make_item("DishSponge",  false, false, false, false));
  infos_.push_back(make_item("SoapBar",     false, false, false, false));
  infos_.push_back(make_item("Apple",       true,  true,  true, true));
  infos_.push_back(make_item("Tomato",      true,  true,  true, true));
  infos_.push_back(make_item("Potato",      true,  true,  true, true));
  infos_.push_back(make_item("Lettuce",     true,  true,  false, true));
  infos_.push_back(make_item("Bread",       true,  false, true, false));
  infos_.push_back(make_item("Egg",         false, false, true, true));
  infos_.push_back(make_item("SaltShaker",  false, false, false, false));
  infos_.push_back(make_item("PepperShaker", false, false, false, false));
  infos_.push_back(make_item("CreditCard",  false, false, false, false));
  infos_.push_back(make_item("KeyChain",    false, false, false, false));
  infos_.push_back(make_item("CellPhone",   false, false, false, false));
  infos_.push_back(make_item("Watch",       false, false, false, false));
  infos_.push_back(make_item("RemoteControl", false, false, false, false));
  infos_.push_back(make_item("Book",        false, false, false, false));
  infos_.push_back(make_item("Pen",         false, false, false, false));
  infos_.push_back(make_item("Pencil",      false, false, false, false));

  for (std::size_t i = 0; i < infos_.size(); ++i) {
    index_[infos_[i].name] = static_cast<CategoryId>(i);
  }
  wall_ = index_.at("Wall");
  floor_ = index_.at("Floor");
}

const Catalog& Catalog::standard() {
  static const Catalog instance;
  return instance;
}

CategoryId Catalog::id(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownCategory(name);
  return it->second;
}

std::vector<CategoryId> Catalog::items() const {
  std::vector<CategoryId> out;
  for (int i = 0; i < size(); ++i) {
    if (infos_[static_cast<std::size_t>(i)].pickupable) out.push_back(i);
  }
  return out;
}

std::vector<CategoryId> Catalog::furniture() const {
  std::vector<CategoryId> out;
  for (int i = 0; i < size(); ++i) {
    if (infos_[static_cast<std::size_t>(i)].blocking) out.push_back(i);
  }
  return out;
}

}  // namespace triplan
