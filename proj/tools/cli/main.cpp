#include "app.hpp"

int main(int argc, char** argv) { return pdsplit::app::run(argc, argv); }
