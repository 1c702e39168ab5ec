"""Regenerate the vendored benchmark graphs.

usage: python3 generate.py <out-dir> <knuth_miles.txt.gz>

The Mycielski and queen graphs are built from their definitions. The miles
graphs need the highway mileage table from the Stanford GraphBase; networkx
ships a copy as examples/drawing/knuth_miles.txt.gz in its source archive.
"""
import gzip, re, sys, os
out = sys.argv[1]

def write(name, n, edges, source):
    edges = sorted(set((min(u, v), max(u, v)) for u, v in edges))
    with open(os.path.join(out, name + ".col"), "w") as f:
        f.write(f"c {name}\nc {source}\np edge {n} {len(edges)}\n")
        for u, v in edges:
            f.write(f"e {u + 1} {v + 1}\n")
    print(name, n, len(edges))

def mycielski(order):
    n, edges = 2, [(0, 1)]
    for _ in range(order - 2):
        new = list(edges)
        for u, v in edges:
            new.append((u, n + v))
            new.append((v, n + u))
        w = 2 * n
        new += [(n + i, w) for i in range(n)]
        n, edges = 2 * n + 1, new
    return n, edges

for k in range(3, 8):
    n, e = mycielski(k + 1)
    write(f"myciel{k}", n, e, f"Mycielski graph M{k + 1}, built by iterating the Mycielski construction from K2")

def queen(rows, cols):
    vid = lambda r, c: r * cols + c
    edges = []
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    for a, (r1, c1) in enumerate(cells):
        for (r2, c2) in cells[a + 1:]:
            if r1 == r2 or c1 == c2 or abs(r1 - r2) == abs(c1 - c2):
                edges.append((vid(r1, c1), vid(r2, c2)))
    return rows * cols, edges

for r, c in [(5, 5), (6, 6), (7, 7), (8, 8), (9, 9), (8, 12)]:
    n, e = queen(r, c)
    write(f"queen{r}.{c}", n, e, f"{r}x{c} queen graph, cells numbered row-major")

lines = [l.rstrip("\n") for l in gzip.open(sys.argv[2], "rt") if not l.startswith("*")]
cities = []
for l in lines:
    if re.match(r"^[0-9 ]+$", l):
        cities[-1][1].extend(map(int, l.split()))
    else:
        cities.append((l, []))
dist = {}
for i, (_, ds) in enumerate(cities):
    for t, d in enumerate(ds):
        dist[(i - 1 - t, i)] = d
for th in (250, 500, 750, 1000, 1500):
    e = [p for p, d in dist.items() if d <= th]
    write(f"miles{th}", len(cities), e, f"Stanford GraphBase highway mileage data (1949), edge iff distance <= {th} miles")
