"""Write the bundled demo asset catalog and its embedding sidecar.

The table below is hand-authored annotation data in the catalog schema;
embeddings come from the hashing provider (one text vector from the
description, one pseudo-render per view caption).

    python3 scripts/build_catalog.py [--out src/roomgen/data]
"""

import argparse
import json
from pathlib import Path

from roomgen.retrieval import Catalog, HashingProvider, embed_record, record_from_annotation

F, W, C, O = "floor", "wall", "ceiling", "object"

# id, category, synset, (width, length, height) cm, placement, materials, description
ASSETS = [
    ("sofa_01", "sofa", "sofa.n.01", (210, 90, 85), F, ["fabric", "wood"], "grey three seat fabric sofa with cushions"),
    ("sofa_02", "sofa", "sofa.n.01", (180, 85, 80), F, ["leather", "metal"], "brown leather two seat sofa"),
    ("sofa_03", "sofa", "sofa.n.01", (240, 95, 80), F, ["fabric"], "large blue sectional sofa"),
    ("armchair_01", "armchair", "armchair.n.01", (80, 80, 90), F, ["fabric", "wood"], "beige upholstered armchair with wooden legs"),
    ("armchair_02", "armchair", "armchair.n.01", (75, 75, 95), F, ["leather"], "black leather lounge armchair"),
    ("coffee_table_01", "coffee table", "coffee_table.n.01", (110, 60, 45), F, ["wood"], "rectangular oak coffee table"),
    ("coffee_table_02", "coffee table", "coffee_table.n.01", (90, 90, 40), F, ["glass", "metal"], "square glass coffee table with metal frame"),
    ("tv_stand_01", "tv stand", "stand.n.04", (160, 40, 50), F, ["wood"], "low walnut tv stand with drawers"),
    ("tv_stand_02", "tv stand", "stand.n.04", (120, 40, 55), F, ["wood", "metal"], "white media console tv stand"),
    ("bookshelf_01", "bookshelf", "bookshelf.n.01", (90, 30, 180), F, ["wood"], "tall wooden bookshelf with five shelves"),
    ("bookshelf_02", "bookshelf", "bookshelf.n.01", (120, 35, 120), F, ["wood"], "low white bookshelf cube storage"),
    ("side_table_01", "side table", "table.n.02", (45, 45, 55), F, ["wood"], "round wooden side table"),
    ("floor_lamp_01", "floor lamp", "floor_lamp.n.01", (35, 35, 160), F, ["metal", "fabric"], "standing floor lamp with linen shade"),
    ("cat_tower_01", "cat tower", "cat_tree.n.01", (60, 60, 180), F, ["sisal", "wood", "carpet"], "multi-level cat tower with sisal scratching posts and platforms"),
    ("cat_tower_02", "cat tower", "cat_tree.n.01", (45, 45, 100), F, ["sisal", "carpet"], "small two level cat tree with scratching post"),
    ("cat_tower_03", "cat tower", "cat_tree.n.01", (80, 80, 200), F, ["wood", "sisal"], "multi-level cat tower with hammock and condo"),
    ("cat_bed_01", "cat bed", "bed.n.01", (50, 40, 20), F, ["fabric"], "soft round cat bed"),
    ("plant_01", "plant", "houseplant.n.01", (50, 50, 120), F, ["ceramic", "plant"], "tall potted monstera plant"),
    ("plant_02", "plant", "houseplant.n.01", (40, 40, 90), F, ["ceramic", "plant"], "potted fiddle leaf fig"),
    ("bed_01", "bed", "bed.n.01", (160, 210, 100), F, ["wood", "fabric"], "queen size wooden bed with white bedding"),
    ("bed_02", "bed", "bed.n.01", (180, 215, 110), F, ["fabric"], "king size upholstered bed with grey headboard"),
    ("bed_03", "bed", "bed.n.01", (100, 200, 90), F, ["metal", "fabric"], "single metal frame bed"),
    ("nightstand_01", "nightstand", "nightstand.n.01", (50, 40, 55), F, ["wood"], "wooden nightstand with one drawer"),
    ("nightstand_02", "nightstand", "nightstand.n.01", (45, 40, 60), F, ["wood"], "white bedside table with two drawers"),
    ("wardrobe_01", "wardrobe", "wardrobe.n.01", (120, 60, 200), F, ["wood"], "two door oak wardrobe"),
    ("wardrobe_02", "wardrobe", "wardrobe.n.01", (100, 55, 190), F, ["wood"], "white wardrobe with mirror door"),
    ("dresser_01", "dresser", "dresser.n.01", (120, 50, 80), F, ["wood"], "six drawer walnut dresser"),
    ("desk_01", "desk", "desk.n.01", (140, 70, 75), F, ["wood", "metal"], "wooden writing desk with metal legs"),
    ("desk_02", "desk", "desk.n.01", (120, 60, 75), F, ["wood"], "compact white study desk"),
    ("office_chair_01", "office chair", "swivel_chair.n.01", (60, 60, 100), F, ["plastic", "fabric"], "black ergonomic office chair on wheels"),
    ("dining_table_01", "dining table", "dining_table.n.01", (160, 90, 75), F, ["wood"], "rectangular oak dining table"),
    ("dining_chair_01", "dining chair", "chair.n.01", (45, 50, 90), F, ["wood"], "wooden dining chair"),
    ("dining_chair_02", "dining chair", "chair.n.01", (45, 50, 85), F, ["plastic", "wood"], "white molded dining chair with wooden legs"),
    ("toilet_01", "toilet", "toilet.n.01", (40, 70, 80), F, ["ceramic"], "white ceramic toilet"),
    ("bathtub_01", "bathtub", "bathtub.n.01", (170, 75, 60), F, ["ceramic"], "white acrylic bathtub"),
    ("vanity_01", "bathroom vanity", "vanity.n.01", (80, 50, 85), F, ["wood", "ceramic"], "bathroom vanity cabinet with sink"),
    ("laundry_basket_01", "laundry basket", "basket.n.01", (45, 35, 60), F, ["wicker"], "woven laundry basket"),
    ("shower_01", "shower", "shower.n.01", (90, 90, 210), F, ["glass", "ceramic"], "square glass shower enclosure"),
    ("fridge_01", "refrigerator", "refrigerator.n.01", (70, 70, 180), F, ["metal"], "stainless steel refrigerator"),
    ("counter_01", "kitchen counter", "counter.n.01", (180, 60, 90), F, ["wood", "stone"], "kitchen counter cabinet with stone top"),
    ("stove_01", "stove", "stove.n.01", (60, 60, 90), F, ["metal"], "four burner gas stove"),
    ("painting_01", "painting", "painting.n.01", (100, 4, 70), W, ["canvas", "wood"], "abstract landscape painting in a wooden frame"),
    ("painting_02", "painting", "painting.n.01", (60, 3, 80), W, ["canvas"], "framed botanical print painting"),
    ("painting_03", "painting", "painting.n.01", (120, 4, 60), W, ["canvas"], "large modern art canvas painting"),
    ("mirror_01", "mirror", "mirror.n.01", (60, 3, 80), W, ["glass", "metal"], "rectangular wall mirror with thin frame"),
    ("wall_shelf_01", "wall shelf", "shelf.n.01", (80, 20, 5), W, ["wood"], "floating wooden wall shelf"),
    ("wall_tv_01", "television", "television_receiver.n.01", (120, 6, 70), W, ["plastic", "glass"], "wall mounted flat screen television"),
    ("clock_01", "clock", "clock.n.01", (35, 4, 35), W, ["metal", "glass"], "round wall clock"),
    ("towel_rack_01", "towel rack", "rack.n.01", (60, 10, 40), W, ["metal"], "chrome wall towel rack"),
    ("book_01", "book", "book.n.01", (15, 22, 4), O, ["paper"], "hardcover book with red cover"),
    ("book_02", "book", "book.n.01", (14, 20, 3), O, ["paper"], "paperback novel"),
    ("book_03", "book", "book.n.01", (20, 26, 2), O, ["paper"], "large art book"),
    ("vase_01", "vase", "vase.n.01", (15, 15, 30), O, ["ceramic"], "white ceramic vase with flowers"),
    ("table_lamp_01", "table lamp", "lamp.n.02", (25, 25, 45), O, ["ceramic", "fabric"], "table lamp with white fabric shade"),
    ("laptop_01", "laptop", "laptop.n.01", (33, 23, 2), O, ["metal", "plastic"], "open silver laptop"),
    ("monitor_01", "monitor", "monitor.n.04", (55, 20, 45), O, ["plastic"], "computer monitor on a stand"),
    ("small_plant_01", "potted plant", "houseplant.n.01", (15, 15, 25), O, ["ceramic", "plant"], "small potted succulent"),
    ("alarm_clock_01", "alarm clock", "alarm_clock.n.01", (12, 6, 10), O, ["plastic"], "digital alarm clock"),
    ("remote_01", "remote control", "remote_control.n.01", (5, 18, 2), O, ["plastic"], "black tv remote control"),
    ("picture_frame_01", "picture frame", "picture_frame.n.01", (20, 3, 25), O, ["wood", "glass"], "wooden picture frame with family photo"),
    ("candle_01", "candle", "candle.n.01", (8, 8, 12), O, ["wax", "glass"], "scented candle in a glass jar"),
    ("soap_01", "soap dispenser", "dispenser.n.01", (8, 8, 18), O, ["plastic"], "white soap dispenser"),
    ("toothbrush_cup_01", "toothbrush holder", "cup.n.01", (8, 8, 12), O, ["ceramic"], "ceramic toothbrush cup"),
    ("bowl_01", "bowl", "bowl.n.01", (25, 25, 10), O, ["ceramic"], "ceramic fruit bowl"),
    ("cat_toy_01", "cat toy", "toy.n.03", (10, 10, 8), O, ["fabric"], "small plush mouse cat toy"),
    ("ceiling_light_01", "ceiling light", "light.n.02", (45, 45, 15), C, ["glass", "metal"], "round flush mount ceiling light"),
    ("ceiling_fan_01", "ceiling fan", "fan.n.01", (120, 120, 40), C, ["wood", "metal"], "ceiling fan with wooden blades and light"),
    ("pendant_lamp_01", "pendant lamp", "lamp.n.02", (40, 40, 60), C, ["metal"], "black metal pendant lamp"),
]


def annotation(row) -> dict:
    aid, cat, synset, (w, l, h), where, mats, desc = row
    return {
        "assetId": aid,
        "annotations": {
            "category": cat, "synset": synset, "width": w, "length": l, "height": h,
            "volume": round(w * l * h * 0.5), "mass": round(w * l * h * 0.5 / 4000, 1),
            "frontView": 0, "description": desc, "materials": mats,
            "onCeiling": where == C, "onWall": where == W,
            "onFloor": where == F, "onObject": where == O,
        },
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/roomgen/data"))
    args = ap.parse_args(argv)
    p = HashingProvider()
    records = []
    for row in ASSETS:
        r = record_from_annotation(json.loads(json.dumps(annotation(row))))
        captions = [f"{r.category} {r.description}", f"{r.category}"]
        records.append(embed_record(r, p, captions))
    out = Path(args.out)
    Catalog(records).dump(out / "catalog.jsonl", out / "catalog.emb")
    print(f"wrote {len(records)} assets to {out / 'catalog.jsonl'}")


if __name__ == "__main__":
    main()
