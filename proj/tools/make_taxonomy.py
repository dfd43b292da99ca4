"""Writes data/taxonomy.tsv, the bundled hypernym tree (child<TAB>parent)."""

import pathlib
import sys

TREE = {
    "entity": ["attribute", "relation", "abstraction", "physical-entity"],
    "attribute": [
        "gender", "race", "height", "build", "age", "hair-color",
        "top-color", "bottom-color", "upper-wear-color", "lower-wear-color",
        "shirt-color", "pants-color", "shoe-color", "type", "material",
    ],
    "relation": ["wear", "ride", "carry", "hold", "drive", "accompany"],
    "wear": ["wearing", "wears", "dressed-in"],
    "ride": ["riding", "rides"],
    "carry": ["carrying", "carries"],
    "hold": ["holding"],
    "drive": ["driving"],
    "accompany": ["with-person"],
    "abstraction": ["visual-property", "location", "time"],
    "visual-property": ["color", "pattern"],
    "color": [
        "red", "blue", "green", "yellow", "black", "white", "grey", "gray",
        "brown", "pink", "purple", "orange", "tan", "beige", "gold", "silver",
        "cream", "turquoise", "cyan", "magenta", "khaki",
    ],
    "red": ["maroon", "burgundy", "crimson"],
    "blue": ["navy", "teal", "indigo"],
    "green": ["olive", "lime"],
    "purple": ["violet", "lavender"],
    "pattern": ["striped", "plaid", "checkered", "floral", "camouflage"],
    "location": ["street", "park", "station", "store", "avenue"],
    "time": ["morning", "afternoon", "evening", "night"],
    "physical-entity": ["object"],
    "object": ["artifact", "living-thing"],
    "living-thing": ["organism"],
    "organism": ["person"],
    "person": ["man", "woman", "boy", "girl", "male", "female", "guy", "victim",
               "adult", "child", "suspect"],
    "artifact": ["covering", "vehicle", "container", "device"],
    "covering": ["consumer-goods"],
    "consumer-goods": ["wearable"],
    "wearable": ["clothes"],
    "clothes": ["garment", "clothing", "apparel", "attire", "outfit"],
    "garment": ["upper-wear", "lower-wear", "footwear", "headwear", "one-piece",
                "accessory"],
    "upper-wear": [
        "shirt", "t-shirt", "tank-top", "blouse", "sweater", "sweatshirt",
        "hoodie", "jacket", "coat", "vest", "polo", "jersey", "cardigan",
        "blazer", "parka", "windbreaker", "tunic",
    ],
    "lower-wear": [
        "pants", "jeans", "shorts", "skirt", "trousers", "dockers",
        "leggings", "slacks", "khakis", "sweatpants", "overalls",
    ],
    "footwear": ["shoe", "boot", "sneaker", "sandal", "heel", "loafer", "slipper"],
    "headwear": ["hat", "cap", "beanie", "helmet", "bandana"],
    "one-piece": ["dress", "gown", "jumpsuit", "uniform", "robe"],
    "accessory": ["scarf", "glove", "belt", "tie", "sunglasses", "glasses",
                  "watch", "necklace"],
    "vehicle": ["motor-vehicle", "bicycle", "scooter", "skateboard"],
    "motor-vehicle": ["car", "truck", "motorcycle", "van", "bus", "suv", "sedan"],
    "container": ["bag", "box", "suitcase"],
    "bag": ["backpack", "purse", "handbag", "duffel"],
    "device": ["phone", "umbrella", "camera"],
}


def main() -> int:
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/taxonomy.tsv")
    seen = set()
    lines = ["# child<TAB>parent; the root is 'entity'"]
    for parent, children in TREE.items():
        for child in children:
            if child in seen:
                raise SystemExit(f"duplicate child {child}")
            seen.add(child)
            lines.append(f"{child}\t{parent}")
    out.write_text("\n".join(lines) + "\n")
    print(f"{len(seen) + 1} concepts -> {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
