// placeholder for book doctests, wired up with the book chapters
