"""
Pairing heap basics
===================

A forest holds any number of heaps.  Items and heaps are plain integers
handed out in creation order.
"""

from pairaudit import Forest, Strategy

forest = Forest()
h = forest.make_heap()

# insert returns the item id; the heap keeps the smallest key at the root
for key in (5, 3, 8, 1, 6):
    forest.insert(h, key)
print("minimum:", forest.find_min(h))

# decrease_key cuts the item out and links it back at the root
item = 2                       # the item with key 8
forest.decrease_key(h, item, 0)
print("after decrease_key:", forest.find_min(h))

# meld consumes both inputs and returns a new heap id
g = forest.make_heap()
forest.insert(g, -4)
merged = forest.meld(h, g)
print("heaps still live:", forest.heaps())

# drain in sorted order
order = []
while (x := forest.delete_min(merged)) is not None:
    order.append(forest.key(x))
print("drained keys:", order)

# the multipass variant only changes how delete_min combines the roots
mp = forest.make_heap(Strategy.MULTIPASS)
for key in range(10, 0, -1):
    forest.insert(mp, key)
forest.delete_min(mp)
forest.validate(mp)
print("multipass minimum:", forest.find_min(mp))
